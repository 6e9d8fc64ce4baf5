"""
BRB Module

Byzantine reliable broadcast instances used by both VBB phases.
"""

from typing import Optional, Type

from app.core.models import Protocol
from app.core.schemas import WireSchema
from app.modules import BaseModule
from app.modules.brb.schema import BrbSchema


class BrbModule(BaseModule):
    """BRB module implementation"""

    def get_module_name(self) -> str:
        """Return the module name"""
        return "brb"

    def get_description(self) -> str:
        return "self-stabilizing Bracha broadcast (INIT/ECHO/READY)"

    def get_protocol(self) -> Optional[Protocol]:
        return Protocol.BRB

    def get_schema(self) -> Optional[Type[WireSchema]]:
        return BrbSchema
