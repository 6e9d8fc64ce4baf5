"""
BRB Module Models

Message taxonomy of the Bracha-style reliable broadcast.
"""

from enum import Enum
from typing import Any, NamedTuple

from app.core.models import NodeId


class BrbKind(str, Enum):
    INIT = "INIT"
    ECHO = "ECHO"
    READY = "READY"

    def __str__(self):
        return self.value


class Phase(str, Enum):
    """The two VBB message phases, each running its own BRB instances"""
    INIT = "init"
    VALID = "valid"

    def __str__(self):
        return self.value


class BrbTag(NamedTuple):
    """Identifies one broadcast instance within one epoch"""
    phase: Phase
    sender: NodeId


class BrbMessage(NamedTuple):
    """Wire item [kind, phase, sender, payload]"""
    kind: BrbKind
    phase: Phase
    sender: NodeId
    payload: Any

    @property
    def tag(self) -> BrbTag:
        return BrbTag(self.phase, self.sender)


__all__ = ["BrbKind", "Phase", "BrbTag", "BrbMessage"]
