"""
Recycler Module

Idealized recycling of completed consensus objects.
"""

from app.modules import BaseModule


class RecyclerModule(BaseModule):
    """Recycler module implementation"""

    def get_module_name(self) -> str:
        """Return the module name"""
        return "recycler"

    def get_description(self) -> str:
        return "omniscient completion detector and epoch reset"
