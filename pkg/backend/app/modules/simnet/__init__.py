"""
Simnet Module

Simulated asynchronous network: bounded channels, fair scheduler, node handles.
"""

from app.modules.simnet.module import SimnetModule
from app.modules.simnet.models import Action, Envelope, Event, Outbox, Probe, RunResult
from app.modules.simnet.node import NodeHandle
from app.modules.simnet.world import SimWorld, run_until, step

# Auto-register module when this package is imported
from app.modules import register_module
register_module(SimnetModule)

__all__ = [
    "SimnetModule",
    "Action",
    "Envelope",
    "Event",
    "Outbox",
    "Probe",
    "RunResult",
    "NodeHandle",
    "SimWorld",
    "run_until",
    "step",
]
