"""
MVC Module

Self-stabilizing intrusion-tolerant multivalued consensus.
"""

from app.modules.mvc.module import MvcModule
from app.modules.mvc.node import MvcNode

# Auto-register module when this package is imported
from app.modules import register_module
register_module(MvcModule)

__all__ = ["MvcModule", "MvcNode"]
