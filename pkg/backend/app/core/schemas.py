"""
Base Schema Class

Abstract base class for wire codecs. Every protocol layer owns exactly one
codec unit that turns the list of items a node emits toward one destination
into an envelope body and back.
"""
from abc import ABC, abstractmethod
from typing import Any, Sequence
import logging

from pydantic import TypeAdapter, ValidationError
from pydantic_core import to_json

from app.core.exceptions import MalformedFrameError
from app.core.models import Protocol

logger = logging.getLogger(__name__)


class WireSchema(ABC):
    """
    Abstract base class for layer wire codecs.

    Each codec defines:
    - the protocol tag it serves
    - the pydantic adapter validating decoded frames
    - how validated items are filtered and normalised for an n-node system

    To add a layer, inherit from this class and implement the abstract methods.
    """

    @staticmethod
    @abstractmethod
    def get_protocol() -> Protocol:
        """
        Return the protocol tag this codec serves.

        Returns:
            Protocol: The layer tag stamped on envelopes
        """
        raise NotImplementedError("Subclasses must implement get_protocol()")

    @staticmethod
    @abstractmethod
    def get_adapter() -> TypeAdapter:
        """Return the adapter validating a whole frame (a JSON array of items)."""
        raise NotImplementedError("Subclasses must implement get_adapter()")

    @classmethod
    def normalize(cls, item: Any, n: int) -> Any:
        """
        Normalise one validated item.

        Override to range-check fields that depend on n. Return None to drop the
        item; raise MalformedFrameError to drop the whole frame.
        """
        return tuple(item)

    @classmethod
    def encode(cls, items: Sequence[Any]) -> bytes:
        return to_json(list(items))

    @classmethod
    def decode(cls, body: bytes, n: int) -> list:
        """
        Decode an envelope body.

        Raises:
            MalformedFrameError: If the body is not a valid frame for this layer
        """
        try:
            raw_items = cls.get_adapter().validate_json(body)
        except ValidationError as e:
            raise MalformedFrameError(
                f"{cls.get_protocol()} frame rejected: {e.error_count()} error(s)"
            ) from e
        items = []
        for raw in raw_items:
            item = cls.normalize(raw, n)
            if item is not None:
                items.append(item)
        return items
