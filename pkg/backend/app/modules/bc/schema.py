"""
BC wire codec.

Frame: JSON array of [kind, round, value] items, kind in EST/AUX/DEC.
Round ranges depend on the round cap and are checked by the receiving object.
"""

from typing import Any, Literal, Tuple

from pydantic import StrictBool, StrictInt, TypeAdapter

from app.core.models import Protocol
from app.core.schemas import WireSchema
from app.modules.bc.models import BcKind

_adapter = TypeAdapter(list[Tuple[Literal["EST", "AUX", "DEC"], StrictInt, StrictBool]])


class BcSchema(WireSchema):
    @staticmethod
    def get_protocol() -> Protocol:
        return Protocol.BC

    @staticmethod
    def get_adapter() -> TypeAdapter:
        return _adapter

    @classmethod
    def normalize(cls, item: Any, n: int) -> Any:
        kind, round_no, value = item
        if round_no < 0:
            return None
        return (BcKind(kind), round_no, value)
