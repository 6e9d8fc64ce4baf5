"""
BRB wire codec.

Frame: JSON array of [kind, phase, sender, payload] items. Payload is any JSON
value except objects; arrays are frozen into tuples.
"""

from typing import Any, Literal, Tuple
import logging

from pydantic import JsonValue, StrictInt, TypeAdapter

from app.core.exceptions import MalformedFrameError
from app.core.models import Protocol, freeze
from app.core.schemas import WireSchema
from app.modules.brb.models import BrbKind, BrbMessage, Phase

logger = logging.getLogger(__name__)

_BrbItem = Tuple[Literal["INIT", "ECHO", "READY"], Literal["init", "valid"], StrictInt, JsonValue]
_adapter = TypeAdapter(list[_BrbItem])


class BrbSchema(WireSchema):
    @staticmethod
    def get_protocol() -> Protocol:
        return Protocol.BRB

    @staticmethod
    def get_adapter() -> TypeAdapter:
        return _adapter

    @classmethod
    def normalize(cls, item: Any, n: int) -> Any:
        kind, phase, sender, payload = item
        if not 0 <= sender < n:
            return None
        try:
            payload = freeze(payload)
        except TypeError as e:
            raise MalformedFrameError(f"BRB payload rejected: {e}") from e
        return BrbMessage(BrbKind(kind), Phase(phase), sender, payload)
