"""
Modules package - One package per protocol layer plus the simulator and harness.

Each layer module is self-contained with its own:
- module.py: BaseModule registration entry
- models.py: Domain types
- schema.py: Wire codec (protocol layers only)
- the state machine or service file(s) of the layer

Modules register themselves when their package is imported.
"""

from typing import List, Optional, Type
import logging
from abc import ABC, abstractmethod

from app.core.models import Protocol
from app.core.schemas import WireSchema

logger = logging.getLogger(__name__)


class BaseModule(ABC):
    """
    Base class for all modules.

    Each module should inherit from this class and implement:
    - get_module_name(): Return the module name
    - get_description(): One line describing the layer
    Protocol layers also override get_protocol() and get_schema().
    """

    @abstractmethod
    def get_module_name(self) -> str:
        """Return the module name"""
        raise NotImplementedError

    @abstractmethod
    def get_description(self) -> str:
        """Return a one-line description"""
        raise NotImplementedError

    def get_protocol(self) -> Optional[Protocol]:
        """Return the wire protocol this module owns, if any"""
        return None

    def get_schema(self) -> Optional[Type[WireSchema]]:
        """Return the wire codec this module owns, if any"""
        return None


# Module registry
_module_registry: List[Type[BaseModule]] = []


def register_module(module_class: Type[BaseModule]):
    """Register a module class"""
    if module_class not in _module_registry:
        _module_registry.append(module_class)
        logger.debug(f"Registered module: {module_class.__name__}")


def get_all_modules() -> List[Type[BaseModule]]:
    """Get all registered modules"""
    return _module_registry.copy()


def get_module_by_name(name: str) -> Optional[Type[BaseModule]]:
    """Get a module by name"""
    for module_class in _module_registry:
        if module_class().get_module_name().lower() == name.lower():
            return module_class
    return None


def import_all_modules() -> List[Type[BaseModule]]:
    """Import every layer package so that it registers itself"""
    import app.modules.simnet
    import app.modules.brb
    import app.modules.bv
    import app.modules.bc
    import app.modules.vbb
    import app.modules.mvc
    import app.modules.recycler
    import app.modules.faults
    import app.modules.harness
    return get_all_modules()


__all__ = [
    "BaseModule",
    "register_module",
    "get_all_modules",
    "get_module_by_name",
    "import_all_modules",
]
