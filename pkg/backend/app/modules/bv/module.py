"""
BV Module

Binary-values broadcast used by multivalued consensus and by every binary
consensus round.
"""

from typing import Optional, Type

from app.core.models import Protocol
from app.core.schemas import WireSchema
from app.modules import BaseModule
from app.modules.bv.schema import BvSchema


class BvModule(BaseModule):
    """BV module implementation"""

    def get_module_name(self) -> str:
        """Return the module name"""
        return "bv"

    def get_description(self) -> str:
        return "binary-values broadcast (relay at t+1, accept at 2t+1)"

    def get_protocol(self) -> Optional[Protocol]:
        return Protocol.BV

    def get_schema(self) -> Optional[Type[WireSchema]]:
        return BvSchema
