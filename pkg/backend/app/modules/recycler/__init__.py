"""
Recycler Module

Detects global completion and resets per-epoch objects.
"""

from app.modules.recycler.module import RecyclerModule
from app.modules.recycler.service import completed, initial_dump, off_initial_state, pending_nodes, recycle

# Auto-register module when this package is imported
from app.modules import register_module
register_module(RecyclerModule)

__all__ = ["RecyclerModule", "completed", "initial_dump", "off_initial_state", "pending_nodes", "recycle"]
