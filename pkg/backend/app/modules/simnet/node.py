"""
Node handles hosted by a SimWorld.

A handle is either a correct state machine or a Byzantine strategy wrapping
one. The world only talks to this interface.
"""

from abc import ABC, abstractmethod
from typing import Any, Dict

from app.core.models import NodeId, Outcome, PENDING, Value
from app.modules.simnet.models import Envelope, Outbox, Probe


class NodeHandle(ABC):
    """Interface between the world and one simulated node"""

    node_id: NodeId
    byzantine: bool = False
    # Handles that never run a do-forever iteration opt out of ticks
    ticks: bool = True

    def __init__(self) -> None:
        self.probe = Probe(getattr(self, "node_id", None))

    def bind_probe(self, probe: Probe) -> None:
        self.probe = probe

    @abstractmethod
    def on_envelope(self, envelope: Envelope) -> Outbox:
        """Handle one received envelope"""
        raise NotImplementedError

    @abstractmethod
    def tick(self) -> Outbox:
        """Run one do-forever iteration"""
        raise NotImplementedError

    @abstractmethod
    def reset(self, epoch: int) -> None:
        """Return every per-epoch object to the post-recycling state"""
        raise NotImplementedError

    def propose(self, value: Value) -> Outbox:
        return Outbox()

    def result(self) -> Outcome:
        return PENDING

    def state_dump(self) -> Dict[str, Any]:
        return {}
