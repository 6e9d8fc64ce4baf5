"""
Self-stabilizing Bracha broadcast instance.

One instance per (phase, sender) tag. Votes are views of what every node last
said, so gossip overwrites stale or corrupted entries. After every event the
instance re-evaluates its local rules (repairs, echo, ready, switch,
inconsistency latch, delivery) and emits whatever changed.
"""

from collections import Counter
from typing import Any, Dict, Optional
import logging

from app.core.exceptions import InjectionError, ProtocolError
from app.core.models import (
    ERROR,
    PENDING,
    NodeId,
    Outcome,
    Protocol,
    SystemParams,
    canonical_key,
    freeze,
    thresholds,
    to_jsonable,
)
from app.modules.brb.models import BrbKind, BrbMessage, BrbTag
from app.modules.simnet.models import Outbox, Probe

logger = logging.getLogger(__name__)

_VOTE_FIELDS = ("echoes", "readies")
_SCALAR_FIELDS = ("my_init", "init_view", "echoed", "readied", "delivered")


class BrbInstance:
    __slots__ = (
        "tag", "node_id", "n", "t", "echo_quorum", "probe",
        "my_init", "init_view", "echoes", "readies",
        "echoed", "readied", "delivered", "inconsistent",
    )

    def __init__(self, tag: BrbTag, node_id: NodeId, params: SystemParams, probe: Optional[Probe] = None):
        limits = thresholds(params)
        self.tag = tag
        self.node_id = node_id
        self.n = params.n
        self.t = params.t
        self.echo_quorum = limits.echo_majority
        self.probe = probe or Probe(node_id)

        self.my_init: Any = None
        self.init_view: Any = None
        self.echoes: Dict[NodeId, Any] = {}
        self.readies: Dict[NodeId, Any] = {}
        self.echoed: Any = None
        self.readied: Any = None
        self.delivered: Any = None
        self.inconsistent = False

    @property
    def is_sender(self) -> bool:
        return self.tag.sender == self.node_id

    def _item(self, kind: BrbKind, payload: Any) -> tuple:
        return (kind.value, self.tag.phase.value, self.tag.sender, payload)

    # ------------------------------------------------------------------
    # Operations
    # ------------------------------------------------------------------

    def broadcast(self, payload: Any) -> Outbox:
        """Start (or restate) this node's broadcast; the first payload of the epoch wins."""
        if not self.is_sender:
            raise ProtocolError(f"Node {self.node_id} cannot broadcast on instance of sender {self.tag.sender}")
        payload = freeze(payload)
        out = Outbox()
        if self.my_init is None:
            self.my_init = payload
            self.probe.record("brb.broadcast", tuple(self.tag), payload)
            out.broadcast(Protocol.BRB, self._item(BrbKind.INIT, payload))
            out += self._evaluate()
        elif self.my_init == payload:
            out.restate(Protocol.BRB, self._item(BrbKind.INIT, payload))
        else:
            logger.warning(
                f"Node {self.node_id}: ignoring second broadcast on {self.tag.phase}/{self.tag.sender} "
                f"({payload!r} after {self.my_init!r})"
            )
            self.probe.anomaly(f"conflicting broadcast on {tuple(self.tag)}")
        return out

    def on_message(self, src: NodeId, msg: BrbMessage) -> Outbox:
        if msg.tag != self.tag:
            return Outbox()
        if not 0 <= src < self.n:
            self.probe.anomaly(f"vote from out-of-range node {src}")
            return Outbox()

        payload = msg.payload
        if msg.kind == BrbKind.INIT:
            if src != self.tag.sender:
                return Outbox()
            if self.init_view == payload:
                return Outbox()
            if self.init_view is not None:
                self.probe.anomaly(f"sender {src} changed its INIT on {tuple(self.tag)}")
            self.init_view = payload
        else:
            votes = self.echoes if msg.kind == BrbKind.ECHO else self.readies
            previous = votes.get(src)
            if previous == payload and src in votes:
                return Outbox()
            if src in votes:
                self.probe.anomaly(f"node {src} overwrote its {msg.kind} vote on {tuple(self.tag)}")
            votes[src] = payload
        return self._evaluate()

    def deliver(self) -> Outcome:
        if self.inconsistent:
            return ERROR
        if self.delivered is not None:
            return Outcome.decided(self.delivered)
        return PENDING

    def resend(self) -> Outbox:
        """Restate this node's INIT/ECHO/READY contributions"""
        out = Outbox()
        if self.is_sender and self.my_init is not None:
            out.restate(Protocol.BRB, self._item(BrbKind.INIT, self.my_init))
        if self.echoed is not None:
            out.restate(Protocol.BRB, self._item(BrbKind.ECHO, self.echoed))
        if self.readied is not None:
            out.restate(Protocol.BRB, self._item(BrbKind.READY, self.readied))
        return out

    # ------------------------------------------------------------------
    # Local rules
    # ------------------------------------------------------------------

    def _echo(self, payload: Any, out: Outbox) -> None:
        self.echoed = payload
        out.broadcast(Protocol.BRB, self._item(BrbKind.ECHO, payload))

    def _ready(self, payload: Any, out: Outbox) -> None:
        self.readied = payload
        out.broadcast(Protocol.BRB, self._item(BrbKind.READY, payload))

    def _stalled(self, echo_counts: Counter, ready_counts: Counter) -> bool:
        """No payload can still gather an echo quorum and no READY support exists"""
        missing = self.n - len(self.echoes)
        best_echo = max(echo_counts.values(), default=0)
        best_ready = max(ready_counts.values(), default=0)
        return best_echo + missing < self.echo_quorum and best_ready <= self.t

    def _evaluate(self) -> Outbox:
        out = Outbox()
        t = self.t

        echo_counts = Counter(self.echoes.values())
        ready_counts = Counter(self.readies.values())
        ready_counts.pop(None, None)
        echo_counts.pop(None, None)

        # A delivery that fewer than t+1 of n-t READY voters back cannot come from a legal run
        if (
            self.delivered is not None
            and len(self.readies) >= self.n - t
            and ready_counts.get(self.delivered, 0) < t + 1
        ):
            logger.debug(f"Node {self.node_id}: dropping unsupported delivery on {tuple(self.tag)}")
            self.probe.anomaly(f"dropped unsupported delivery on {tuple(self.tag)}")
            self.delivered = None

        # Repairs of states no legal run can produce
        if self.is_sender and self.my_init is not None and self.echoed != self.my_init:
            if self.echoed is not None:
                logger.debug(f"Node {self.node_id}: repairing echo on own instance {tuple(self.tag)}")
            self._echo(self.my_init, out)
        if self.delivered is not None and self.readied != self.delivered:
            self._ready(self.delivered, out)

        if self.echoed is None and self.init_view is not None:
            self._echo(self.init_view, out)

        if (
            self.init_view is not None
            and self.echoed != self.init_view
            and not self.is_sender
            and self._stalled(echo_counts, ready_counts)
        ):
            logger.debug(f"Node {self.node_id}: realigning echo on stalled instance {tuple(self.tag)}")
            self.probe.anomaly(f"realigned echo on {tuple(self.tag)}")
            self._echo(self.init_view, out)

        supported = sorted(
            (payload for payload, count in ready_counts.items() if count >= t + 1),
            key=canonical_key,
        )

        if self.readied is None:
            quorum = [payload for payload, count in echo_counts.items() if count >= self.echo_quorum]
            if quorum:
                self._ready(min(quorum, key=canonical_key), out)
            elif len(supported) == 1:
                self._ready(supported[0], out)
        elif ready_counts.get(self.readied, 0) < t + 1:
            others = [payload for payload in supported if payload != self.readied]
            if len(others) == 1 and self.delivered is None:
                logger.debug(f"Node {self.node_id}: switching READY on {tuple(self.tag)}")
                self._ready(others[0], out)

        if not self.inconsistent:
            if len(supported) >= 2 or (len(self.readies) >= self.n - t and not supported):
                self.inconsistent = True
                logger.info(f"Node {self.node_id}: instance {tuple(self.tag)} latched inconsistent")
                self.probe.record("brb.inconsistent", tuple(self.tag), None)

        if self.delivered is None:
            for payload, count in ready_counts.items():
                if count >= 2 * t + 1:
                    self.delivered = payload
                    self.probe.record("brb.deliver", tuple(self.tag), payload)
                    if self.readied != payload:
                        self._ready(payload, out)
                    break
        return out

    # ------------------------------------------------------------------
    # State access
    # ------------------------------------------------------------------

    def inject(self, field: str, value: Any) -> None:
        """Overwrite one state field; values may be semantically illegal but must be representable"""
        head, _, rest = field.partition(".")
        try:
            if head in _SCALAR_FIELDS and not rest:
                setattr(self, head, freeze(value))
            elif head == "inconsistent" and not rest:
                if not isinstance(value, bool):
                    raise InjectionError(f"inconsistent must be a boolean, got {value!r}")
                self.inconsistent = value
            elif head in _VOTE_FIELDS and rest:
                node = int(rest)
                if not 0 <= node < self.n:
                    raise InjectionError(f"vote slot {node} out of range")
                votes = getattr(self, head)
                if value is None:
                    votes.pop(node, None)
                else:
                    votes[node] = freeze(value)
            elif head in _VOTE_FIELDS and not rest:
                if not isinstance(value, dict):
                    raise InjectionError(f"{head} expects a node -> payload map")
                votes = {int(node): freeze(vote) for node, vote in value.items() if vote is not None}
                if any(not 0 <= node < self.n for node in votes):
                    raise InjectionError(f"{head} holds an out-of-range node")
                setattr(self, head, votes)
            else:
                raise InjectionError(f"Unknown BRB field: {field}")
        except (TypeError, ValueError) as e:
            if isinstance(e, InjectionError):
                raise
            raise InjectionError(f"Cannot set BRB field {field} to {value!r}: {e}") from e

    def state_dump(self) -> dict:
        return {
            "my_init": to_jsonable(self.my_init),
            "init_view": to_jsonable(self.init_view),
            "echoes": {str(node): to_jsonable(vote) for node, vote in sorted(self.echoes.items())},
            "readies": {str(node): to_jsonable(vote) for node, vote in sorted(self.readies.items())},
            "echoed": to_jsonable(self.echoed),
            "readied": to_jsonable(self.readied),
            "delivered": to_jsonable(self.delivered),
            "inconsistent": self.inconsistent,
        }
