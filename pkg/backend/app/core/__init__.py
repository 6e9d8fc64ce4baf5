"""
Core module - Shared utilities and infrastructure.

This module contains all shared functionality used across the protocol layers:
- Configuration
- Logging
- Domain vocabulary (outcomes, system parameters, quorum thresholds)
- Error hierarchy
- Wire codec base class
"""

from app.core.config import settings
from app.core.logging_config import setup_logging
from app.core.exceptions import (
    SsbftError,
    ParameterError,
    ProtocolError,
    MalformedFrameError,
    ScenarioError,
    InjectionError,
    RecycleError,
)
from app.core.models import (
    Outcome,
    OutcomeTag,
    PENDING,
    ERROR,
    Protocol,
    SystemParams,
    Thresholds,
    thresholds,
)
from app.core.schemas import WireSchema

# Schema registry imports are deferred to avoid circular imports
# Import directly from app.core.schema_registry when needed

__all__ = [
    "settings",
    "setup_logging",
    "SsbftError",
    "ParameterError",
    "ProtocolError",
    "MalformedFrameError",
    "ScenarioError",
    "InjectionError",
    "RecycleError",
    "Outcome",
    "OutcomeTag",
    "PENDING",
    "ERROR",
    "Protocol",
    "SystemParams",
    "Thresholds",
    "thresholds",
    "WireSchema",
]
