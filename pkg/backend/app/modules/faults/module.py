"""
Faults Module

Byzantine strategies and transient-fault injection.
"""

from app.modules import BaseModule


class FaultsModule(BaseModule):
    """Faults module implementation"""

    def get_module_name(self) -> str:
        """Return the module name"""
        return "faults"

    def get_description(self) -> str:
        return "Byzantine strategy library and arbitrary-state injector"
