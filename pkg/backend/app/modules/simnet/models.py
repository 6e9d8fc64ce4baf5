"""
Simnet Module Models

Hot-path value types of the simulator: envelopes, node outputs, scheduler
actions, recorded events and run results.
"""

from dataclasses import dataclass, field
from typing import Any, Callable, List, NamedTuple, Optional, Tuple, TYPE_CHECKING
import logging

from app.core.models import NodeId, Protocol

if TYPE_CHECKING:
    from app.modules.simnet.world import SimWorld

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class Envelope:
    """src is stamped by the world, never by node code"""

    src: NodeId
    dst: NodeId
    protocol: Protocol
    epoch: int
    body: bytes


@dataclass(slots=True)
class Outbox:
    """
    Everything one node step wants to send.

    fresh items go to every node, gossip items restate the node's contribution
    and travel to one round-robin destination per tick, targeted items go to a
    single destination and raw frames bypass the codec.
    """

    fresh: List[Tuple[Protocol, Any]] = field(default_factory=list)
    gossip: List[Tuple[Protocol, Any]] = field(default_factory=list)
    targeted: List[Tuple[NodeId, Protocol, Any]] = field(default_factory=list)
    raw: List[Tuple[NodeId, Protocol, bytes]] = field(default_factory=list)

    def broadcast(self, protocol: Protocol, item: Any) -> "Outbox":
        self.fresh.append((protocol, item))
        return self

    def restate(self, protocol: Protocol, item: Any) -> "Outbox":
        self.gossip.append((protocol, item))
        return self

    def send(self, dst: NodeId, protocol: Protocol, item: Any) -> "Outbox":
        self.targeted.append((dst, protocol, item))
        return self

    def send_raw(self, dst: NodeId, protocol: Protocol, body: bytes) -> "Outbox":
        self.raw.append((dst, protocol, body))
        return self

    def extend(self, other: "Outbox") -> "Outbox":
        self.fresh.extend(other.fresh)
        self.gossip.extend(other.gossip)
        self.targeted.extend(other.targeted)
        self.raw.extend(other.raw)
        return self

    def __iadd__(self, other: "Outbox") -> "Outbox":
        return self.extend(other)

    def __bool__(self) -> bool:
        return bool(self.fresh or self.gossip or self.targeted or self.raw)

    def items_for(self, protocol: Protocol) -> List[Any]:
        """Fresh and gossip items of one layer, in emission order"""
        return [item for p, item in self.fresh + self.gossip if p == protocol]


class Action(NamedTuple):
    """A scheduler action: deliver the head of channel (src, dst) or tick node src"""

    kind: str
    src: NodeId
    dst: NodeId

    @classmethod
    def deliver(cls, src: NodeId, dst: NodeId) -> "Action":
        return cls("deliver", src, dst)

    @classmethod
    def tick(cls, node: NodeId) -> "Action":
        return cls("tick", node, node)


@dataclass(frozen=True, slots=True)
class Event:
    """A protocol-level event observed at a node (delivery, decision, ...)"""

    step: int
    epoch: int
    node: NodeId
    kind: str
    key: tuple
    value: Any


class Probe:
    """
    Per-node observation hook.

    Layers record events and anomalies here; the world binds probes to its
    step clock and shared event log. An unbound probe keeps its own log.
    """

    def __init__(
        self,
        node_id: Optional[NodeId] = None,
        clock: Optional[Callable[[], int]] = None,
        epoch: Optional[Callable[[], int]] = None,
        events: Optional[List[Event]] = None,
    ):
        self.node_id = node_id
        self._clock = clock or (lambda: 0)
        self._epoch = epoch or (lambda: 0)
        self.events: List[Event] = events if events is not None else []
        self.anomalies = 0

    def record(self, kind: str, key: tuple = (), value: Any = None) -> None:
        self.events.append(Event(self._clock(), self._epoch(), self.node_id, kind, key, value))

    def anomaly(self, message: str) -> None:
        self.anomalies += 1
        logger.debug(f"Node {self.node_id} anomaly: {message}")


@dataclass(slots=True)
class RunResult:
    world: "SimWorld"
    satisfied: bool
    steps: int


__all__ = [
    "Envelope",
    "Outbox",
    "Action",
    "Event",
    "Probe",
    "RunResult",
]
