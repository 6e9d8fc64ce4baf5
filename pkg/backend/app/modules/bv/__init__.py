"""
BV Module

Self-stabilizing binary-values broadcast object.
"""

from app.modules.bv.module import BvModule
from app.modules.bv.binary_values import BvObject

# Auto-register module when this package is imported
from app.modules import register_module
register_module(BvModule)

__all__ = ["BvModule", "BvObject"]
