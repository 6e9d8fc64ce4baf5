"""
BRB Module

Bracha-style reliable broadcast with query-based delivery and retransmission.
"""

from app.modules.brb.module import BrbModule
from app.modules.brb.models import BrbKind, BrbMessage, BrbTag, Phase
from app.modules.brb.instance import BrbInstance

# Auto-register module when this package is imported
from app.modules import register_module
register_module(BrbModule)

__all__ = ["BrbModule", "BrbKind", "BrbMessage", "BrbTag", "Phase", "BrbInstance"]
