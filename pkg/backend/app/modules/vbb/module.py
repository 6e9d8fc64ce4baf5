"""
VBB Module

Validated Byzantine broadcast over two phases of BRB instances.
"""

from app.modules import BaseModule


class VbbModule(BaseModule):
    """VBB module implementation"""

    def get_module_name(self) -> str:
        """Return the module name"""
        return "vbb"

    def get_description(self) -> str:
        return "validated broadcast: INIT and VALID BRB phases with consistency tests"
