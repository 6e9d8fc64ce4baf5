"""
VBB Module

Self-stabilizing validated Byzantine broadcast.
"""

from app.modules.vbb.module import VbbModule
from app.modules.vbb.node import VbbNode

# Auto-register module when this package is imported
from app.modules import register_module
register_module(VbbModule)

__all__ = ["VbbModule", "VbbNode"]
