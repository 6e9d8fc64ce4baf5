"""
BV wire codec.

Frame: JSON array of [value] items, value a strict boolean.
"""

from typing import Tuple

from pydantic import StrictBool, TypeAdapter

from app.core.models import Protocol
from app.core.schemas import WireSchema

_adapter = TypeAdapter(list[Tuple[StrictBool]])


class BvSchema(WireSchema):
    @staticmethod
    def get_protocol() -> Protocol:
        return Protocol.BV

    @staticmethod
    def get_adapter() -> TypeAdapter:
        return _adapter
