"""
MVC Module

Multivalued consensus reduced to VBB plus one binary consensus.
"""

from app.modules import BaseModule


class MvcModule(BaseModule):
    """Multivalued consensus module implementation"""

    def get_module_name(self) -> str:
        """Return the module name"""
        return "mvc"

    def get_description(self) -> str:
        return "intrusion-tolerant multivalued consensus over VBB, BV and binary consensus"
