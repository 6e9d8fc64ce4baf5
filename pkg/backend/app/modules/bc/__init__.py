"""
BC Module

Binary consensus object with query-based result.
"""

from app.modules.bc.module import BcModule
from app.modules.bc.models import BcKind, DEC_ROUND
from app.modules.bc.coin import BaseCoin, CommonCoin, ConstantCoin
from app.modules.bc.consensus import BcObject

# Auto-register module when this package is imported
from app.modules import register_module
register_module(BcModule)

__all__ = ["BcModule", "BcKind", "DEC_ROUND", "BaseCoin", "CommonCoin", "ConstantCoin", "BcObject"]
