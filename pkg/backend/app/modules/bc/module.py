"""
BC Module

Randomized binary consensus with a common coin.
"""

from typing import Optional, Type

from app.core.models import Protocol
from app.core.schemas import WireSchema
from app.modules import BaseModule
from app.modules.bc.schema import BcSchema


class BcModule(BaseModule):
    """BC module implementation"""

    def get_module_name(self) -> str:
        """Return the module name"""
        return "bc"

    def get_description(self) -> str:
        return "binary consensus over BV rounds, AUX exchange and a common coin"

    def get_protocol(self) -> Optional[Protocol]:
        return Protocol.BC

    def get_schema(self) -> Optional[Type[WireSchema]]:
        return BcSchema
