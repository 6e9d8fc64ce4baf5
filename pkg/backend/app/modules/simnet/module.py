"""
Simnet Module

Deterministic discrete-event network the protocol layers run on.
"""

from app.modules import BaseModule


class SimnetModule(BaseModule):
    """Simnet module implementation"""

    def get_module_name(self) -> str:
        """Return the module name"""
        return "simnet"

    def get_description(self) -> str:
        return "bounded directed channels, seeded fair scheduler, atomic steps"
