"""
Core models - Shared domain vocabulary used across modules.

This module contains the types every layer speaks:
- NodeId / Value aliases
- Protocol layer tags
- Outcome, the closed three-valued protocol result (pending, error, decided)
- SystemParams and the quorum thresholds derived from them
"""

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Any
import logging

from pydantic import BaseModel, ConfigDict, Field
from pydantic_core import to_json

from app.core.exceptions import ParameterError

# Set up logger
logger = logging.getLogger(__name__)

NodeId = int
Value = str


class Protocol(str, Enum):
    """Layer tag carried by every envelope"""
    BRB = "BRB"
    BV = "BV"
    BC = "BC"

    def __str__(self):
        return self.value


class OutcomeTag(str, Enum):
    PENDING = "pending"
    ERROR = "error"
    DECIDED = "decided"

    def __str__(self):
        return self.value


@dataclass(frozen=True, slots=True)
class Outcome:
    """Pending encodes ⊥, Error encodes ⊠, Decided carries exactly one value."""

    tag: OutcomeTag
    value: Any = None

    def __post_init__(self):
        if self.tag is not OutcomeTag.DECIDED and self.value is not None:
            raise ValueError(f"{self.tag} outcome cannot carry a value")

    @classmethod
    def decided(cls, value: Any) -> "Outcome":
        return cls(OutcomeTag.DECIDED, value)

    @property
    def is_pending(self) -> bool:
        return self.tag is OutcomeTag.PENDING

    @property
    def is_error(self) -> bool:
        return self.tag is OutcomeTag.ERROR

    @property
    def is_decided(self) -> bool:
        return self.tag is OutcomeTag.DECIDED

    def to_json(self) -> dict:
        return {"tag": self.tag.value, "value": to_jsonable(self.value)}

    @classmethod
    def from_json(cls, data: Any) -> "Outcome":
        """Accepts {"tag": ..., "value": ...} or a bare tag string"""
        if isinstance(data, str):
            data = {"tag": data}
        if not isinstance(data, dict) or "tag" not in data:
            raise ValueError(f"Not an outcome: {data!r}")
        tag = OutcomeTag(data["tag"])
        if tag is OutcomeTag.DECIDED:
            return cls.decided(freeze(data.get("value")))
        return PENDING if tag is OutcomeTag.PENDING else ERROR

    def __str__(self):
        if self.is_decided:
            return f"Decided({self.value!r})"
        return "Pending" if self.is_pending else "Error"


PENDING = Outcome(OutcomeTag.PENDING)
ERROR = Outcome(OutcomeTag.ERROR)


class SystemParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1)
    t: int = Field(..., ge=0)


class Thresholds(BaseModel):
    model_config = ConfigDict(frozen=True)

    quorum_nt: int
    quorum_n2t: int
    plurality_t1: int
    echo_majority: int
    ready_delivery: int


@lru_cache(maxsize=None)
def _thresholds(n: int, t: int) -> Thresholds:
    if t < 0 or n < 3 * t + 1:
        logger.warning(f"Rejected system parameters n={n}, t={t}")
        raise ParameterError(f"n={n}, t={t} violates 3t + 1 <= n")
    return Thresholds(
        quorum_nt=n - t,
        quorum_n2t=n - 2 * t,
        plurality_t1=t + 1,
        echo_majority=(n + t) // 2 + 1,
        ready_delivery=2 * t + 1,
    )


def thresholds(params: SystemParams) -> Thresholds:
    """Quorum sizes n−t, n−2t, t+1, ⌊(n+t)/2⌋+1 and 2t+1 for params"""
    return _thresholds(params.n, params.t)


def freeze(value: Any) -> Any:
    """Turn a JSON value into a hashable one (arrays become tuples)."""
    if isinstance(value, (list, tuple)):
        return tuple(freeze(item) for item in value)
    if value is None or isinstance(value, (str, bool, int, float)):
        return value
    raise TypeError(f"Unsupported payload type: {type(value).__name__}")


def to_jsonable(value: Any) -> Any:
    if isinstance(value, tuple):
        return [to_jsonable(item) for item in value]
    return value


def canonical_key(value: Any) -> str:
    """Stable ordering key for payloads mixing types"""
    return to_json(value).decode()


__all__ = [
    "NodeId",
    "Value",
    "Protocol",
    "OutcomeTag",
    "Outcome",
    "PENDING",
    "ERROR",
    "SystemParams",
    "Thresholds",
    "thresholds",
    "freeze",
    "to_jsonable",
    "canonical_key",
]
