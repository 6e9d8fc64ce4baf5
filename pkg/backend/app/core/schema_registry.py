"""
Schema Registry Module

Centralized registry for all layer wire codecs.
Filled from the module registry: every protocol layer module names its codec.
"""

from typing import Dict, List, Type
import logging
import threading
from app.core.models import Protocol
from app.core.schemas import WireSchema

logger = logging.getLogger(__name__)

# Registry to store all codec classes
_registry: Dict[Protocol, Type[WireSchema]] = {}
_lock = threading.Lock()


def _register_schema(schema_class: Type[WireSchema]) -> None:
    """
    Register a codec class in the registry.

    Args:
        schema_class: The codec class to register
    """
    protocol = schema_class.get_protocol()
    if protocol not in _registry:
        _registry[protocol] = schema_class
        logger.debug(f"Registered schema: {schema_class.__name__} for protocol: {protocol}")


def get_schema(protocol: Protocol) -> Type[WireSchema]:
    """
    Get the codec class for a protocol tag.

    Raises:
        KeyError: If no codec serves the protocol
    """
    _register_all_schemas()
    return _registry[Protocol(protocol)]


# Lazy import and registration of schemas to avoid circular imports
def _register_all_schemas():
    """Register the codec of every layer module that owns one. Called on first lookup."""
    if len(_registry) == len(Protocol):  # Already registered
        return

    from app.modules import import_all_modules

    modules = [module_class() for module_class in import_all_modules()]

    # Sweeps look codecs up from worker threads
    with _lock:
        for module in modules:
            schema_class = module.get_schema()
            if schema_class is None:
                continue
            if schema_class.get_protocol() != module.get_protocol():
                raise RuntimeError(
                    f"Module {module.get_module_name()} pairs {module.get_protocol()} with a codec for "
                    f"{schema_class.get_protocol()}"
                )
            _register_schema(schema_class)

    missing = [str(p) for p in Protocol if p not in _registry]
    if missing:
        logger.error(f"No codec registered for protocols: {missing}")
    logger.info(f"Schema registry initialized with {len(_registry)} schemas: {[str(p) for p in _registry]}")


def get_all_schemas() -> List[Type[WireSchema]]:
    """Get all registered codec classes"""
    _register_all_schemas()
    return list(_registry.values())


__all__ = [
    "get_schema",
    "get_all_schemas",
]
