"""
Non-self-stabilizing reference stack.

Plain Bracha broadcast, the blocking VBB of the original algorithm and the
non-stabilizing reduction to binary consensus. Every wait condition is
re-evaluated after each event and its outcome latched once. It shares the wire
format of the self-stabilizing stack so both run on the same simulator and
the same Byzantine wrappers; it does not accept state injection.
"""

from collections import Counter
from typing import Any, Dict, List, Optional, Sequence
import logging

from app.core.exceptions import MalformedFrameError, ProtocolError
from app.core.models import (
    ERROR,
    PENDING,
    NodeId,
    Outcome,
    Protocol,
    SystemParams,
    Value,
    canonical_key,
    freeze,
    thresholds,
    to_jsonable,
)
from app.core.schema_registry import get_schema
from app.modules.bc.coin import BaseCoin
from app.modules.bc.consensus import BcObject
from app.modules.brb.models import BrbKind, BrbMessage, BrbTag, Phase
from app.modules.simnet.models import Envelope, Outbox, Probe
from app.modules.simnet.node import NodeHandle

logger = logging.getLogger(__name__)


class BrachaInstance:
    """First-seen Bracha broadcast: one INIT, one ECHO and one READY per node"""

    __slots__ = ("tag", "node_id", "n", "t", "echo_quorum", "probe",
                 "my_init", "init_view", "echoes", "readies", "echoed", "readied", "delivered")

    def __init__(self, tag: BrbTag, node_id: NodeId, params: SystemParams, probe: Optional[Probe] = None):
        self.tag = tag
        self.node_id = node_id
        self.n = params.n
        self.t = params.t
        self.echo_quorum = thresholds(params).echo_majority
        self.probe = probe or Probe(node_id)
        self.my_init: Any = None
        self.init_view: Any = None
        self.echoes: Dict[NodeId, Any] = {}
        self.readies: Dict[NodeId, Any] = {}
        self.echoed: Any = None
        self.readied: Any = None
        self.delivered: Any = None

    def _item(self, kind: BrbKind, payload: Any) -> tuple:
        return (kind.value, self.tag.phase.value, self.tag.sender, payload)

    def broadcast(self, payload: Any) -> Outbox:
        if self.tag.sender != self.node_id:
            raise ProtocolError(f"Node {self.node_id} cannot broadcast on instance of sender {self.tag.sender}")
        out = Outbox()
        if self.my_init is not None:
            return out
        self.my_init = freeze(payload)
        self.probe.record("brb.broadcast", tuple(self.tag), self.my_init)
        out.broadcast(Protocol.BRB, self._item(BrbKind.INIT, self.my_init))
        return out

    def on_message(self, src: NodeId, msg: BrbMessage) -> Outbox:
        if msg.kind == BrbKind.INIT:
            if src != self.tag.sender or self.init_view is not None:
                return Outbox()
            self.init_view = msg.payload
        else:
            votes = self.echoes if msg.kind == BrbKind.ECHO else self.readies
            if src in votes:
                return Outbox()
            votes[src] = msg.payload
        return self._evaluate()

    def _evaluate(self) -> Outbox:
        out = Outbox()
        if self.echoed is None and self.init_view is not None:
            self.echoed = self.init_view
            out.broadcast(Protocol.BRB, self._item(BrbKind.ECHO, self.echoed))

        ready_counts = Counter(self.readies.values())
        if self.readied is None:
            echo_counts = Counter(self.echoes.values())
            candidates = [p for p, c in echo_counts.items() if c >= self.echo_quorum]
            candidates += [p for p, c in ready_counts.items() if c >= self.t + 1]
            if candidates:
                self.readied = min(candidates, key=canonical_key)
                out.broadcast(Protocol.BRB, self._item(BrbKind.READY, self.readied))

        if self.delivered is None:
            delivered = [p for p, c in ready_counts.items() if c >= 2 * self.t + 1]
            if delivered:
                self.delivered = min(delivered, key=canonical_key)
                self.probe.record("brb.deliver", tuple(self.tag), self.delivered)
        return out

    def deliver(self) -> Outcome:
        return Outcome.decided(self.delivered) if self.delivered is not None else PENDING

    def resend(self) -> Outbox:
        out = Outbox()
        if self.my_init is not None:
            out.restate(Protocol.BRB, self._item(BrbKind.INIT, self.my_init))
        if self.echoed is not None:
            out.restate(Protocol.BRB, self._item(BrbKind.ECHO, self.echoed))
        if self.readied is not None:
            out.restate(Protocol.BRB, self._item(BrbKind.READY, self.readied))
        return out

    def state_dump(self) -> dict:
        return {
            "my_init": to_jsonable(self.my_init),
            "init_view": to_jsonable(self.init_view),
            "echoes": {str(k): to_jsonable(v) for k, v in sorted(self.echoes.items())},
            "readies": {str(k): to_jsonable(v) for k, v in sorted(self.readies.items())},
            "echoed": to_jsonable(self.echoed),
            "readied": to_jsonable(self.readied),
            "delivered": to_jsonable(self.delivered),
        }


class ReferenceVbb:
    """Blocking VBB: wait for n−t INIT deliveries, then validate, then wait per sender"""

    def __init__(self, node_id: NodeId, params: SystemParams, values: Sequence[Value], probe: Optional[Probe] = None):
        self.node_id = node_id
        self.params = params
        self.limits = thresholds(params)
        self._value_set = frozenset(values)
        self.probe = probe or Probe(node_id)
        self.brb: Dict[Phase, List[Optional[BrachaInstance]]] = {
            Phase.INIT: [None] * params.n,
            Phase.VALID: [None] * params.n,
        }
        self.my_value: Optional[Value] = None
        self.valid_sent: Optional[bool] = None
        self.delivered: List[Outcome] = [PENDING] * params.n

    def instance(self, phase: Phase, sender: NodeId) -> BrachaInstance:
        inst = self.brb[phase][sender]
        if inst is None:
            inst = BrachaInstance(BrbTag(phase, sender), self.node_id, self.params, self.probe)
            self.brb[phase][sender] = inst
        return inst

    def vbb_broadcast(self, value: Value) -> Outbox:
        if value not in self._value_set:
            raise ProtocolError(f"Node {self.node_id}: {value!r} is not in the value set")
        if self.my_value is None:
            self.my_value = value
        out = self.instance(Phase.INIT, self.node_id).broadcast((self.node_id, value))
        out += self._advance()
        return out

    def on_brb_message(self, src: NodeId, msg: BrbMessage) -> Outbox:
        if not 0 <= msg.sender < self.params.n:
            return Outbox()
        out = self.instance(msg.phase, msg.sender).on_message(src, msg)
        out += self._advance()
        return out

    def _init_values(self) -> List[Any]:
        """Value components of completed INIT deliveries (None for malformed ones)"""
        values = []
        for sender, inst in enumerate(self.brb[Phase.INIT]):
            if inst is None or inst.delivered is None:
                continue
            payload = inst.delivered
            ok = isinstance(payload, tuple) and len(payload) == 2 and payload[0] == sender
            values.append(payload[1] if ok else None)
        return values

    def _advance(self) -> Outbox:
        out = Outbox()
        rec = self._init_values()
        limits = self.limits
        if self.my_value is not None and self.valid_sent is None and len(rec) >= limits.quorum_nt:
            self.valid_sent = sum(1 for v in rec if v == self.my_value) >= limits.quorum_n2t
            out += self.instance(Phase.VALID, self.node_id).broadcast((self.node_id, self.valid_sent))

        for k in range(self.params.n):
            if not self.delivered[k].is_pending:
                continue
            init, valid = self.brb[Phase.INIT][k], self.brb[Phase.VALID][k]
            if init is None or valid is None or init.delivered is None or valid.delivered is None:
                continue
            init_payload, valid_payload = init.delivered, valid.delivered
            if not (isinstance(init_payload, tuple) and len(init_payload) == 2 and init_payload[0] == k):
                continue
            if not (isinstance(valid_payload, tuple) and len(valid_payload) == 2 and valid_payload[0] == k):
                continue
            value, validated = init_payload[1], valid_payload[1]
            if value not in self._value_set or not isinstance(validated, bool):
                continue
            if validated and sum(1 for v in rec if v == value) >= limits.quorum_n2t:
                self.delivered[k] = Outcome.decided(value)
            elif not validated and sum(1 for v in rec if v != value) >= limits.plurality_t1:
                self.delivered[k] = ERROR
        return out

    def delivery_table(self) -> List[Outcome]:
        return self.delivered

    def vbb_deliver(self, k: NodeId) -> Outcome:
        return self.delivered[k]

    def resend(self) -> Outbox:
        out = Outbox()
        for phase in (Phase.INIT, Phase.VALID):
            for inst in self.brb[phase]:
                if inst is not None:
                    out += inst.resend()
        return out

    def state_dump(self) -> dict:
        return {
            "brb": {
                phase.value: [inst.state_dump() if inst is not None else None for inst in self.brb[phase]]
                for phase in (Phase.INIT, Phase.VALID)
            },
            "my_value": self.my_value,
            "valid_sent": self.valid_sent,
            "delivered": [o.to_json() for o in self.delivered],
        }


class ReferenceNode(NodeHandle):
    """Non-stabilizing multivalued consensus node (no BV consistency object)"""

    def __init__(
        self,
        node_id: NodeId,
        params: SystemParams,
        values: Sequence[Value],
        seed: int = 0,
        round_cap: Optional[int] = None,
        coin: Optional[BaseCoin] = None,
        epoch: int = 0,
    ):
        self.node_id = node_id
        super().__init__()
        self.params = params
        self.limits = thresholds(params)
        self.values = tuple(values)
        self.seed = seed
        self.round_cap = round_cap
        self.coin = coin
        self.bv = None
        self.reset(epoch)

    def reset(self, epoch: int) -> None:
        self.epoch = epoch
        self.proposal: Optional[Value] = None
        self.decision: Outcome = PENDING
        self.vbb = ReferenceVbb(self.node_id, self.params, self.values, self.probe)
        self.bc = BcObject(
            self.node_id, self.params, seed=self.seed, epoch=epoch,
            round_cap=self.round_cap, coin=self.coin, probe=self.probe,
        )

    def bind_probe(self, probe: Probe) -> None:
        super().bind_probe(probe)
        self.vbb.probe = probe
        for phase in (Phase.INIT, Phase.VALID):
            for inst in self.vbb.brb[phase]:
                if inst is not None:
                    inst.probe = probe
        self.bc.probe = probe

    def _counts(self) -> Counter:
        return Counter(o.value for o in self.vbb.delivery_table() if o.is_decided)

    def _advance(self) -> Outbox:
        out = Outbox()
        table = self.vbb.delivery_table()
        if self.bc.proposal is None and sum(1 for o in table if not o.is_pending) >= self.limits.quorum_nt:
            counts = self._counts()
            same = len(counts) == 1 and max(counts.values()) >= self.limits.quorum_n2t
            out += self.bc.bc_propose(same)

        if self.decision.is_pending:
            binary = self.bc.bc_result()
            if binary.is_error or (binary.is_decided and binary.value is not True):
                self.decision = ERROR
            elif binary.is_decided:
                candidates = [(-c, v) for v, c in self._counts().items() if c >= self.limits.quorum_n2t]
                if candidates:
                    self.decision = Outcome.decided(min(candidates)[1])
            if not self.decision.is_pending:
                logger.debug(f"Reference node {self.node_id} decided {self.decision}")
        return out

    def propose(self, value: Value) -> Outbox:
        if self.proposal is not None:
            if value != self.proposal:
                self.probe.anomaly("conflicting proposal")
            return Outbox()
        self.proposal = value
        self.probe.record("mvc.propose", (), value)
        out = self.vbb.vbb_broadcast(value)
        out += self._advance()
        return out

    def on_envelope(self, envelope: Envelope) -> Outbox:
        try:
            items = get_schema(envelope.protocol).decode(envelope.body, self.params.n)
        except MalformedFrameError as e:
            self.probe.anomaly(f"dropped frame from {envelope.src}: {e}")
            return Outbox()
        out = Outbox()
        if envelope.protocol == Protocol.BRB:
            for msg in items:
                out += self.vbb.on_brb_message(envelope.src, msg)
        elif envelope.protocol == Protocol.BC:
            for kind, round_no, value in items:
                out += self.bc.on_bc_message(envelope.src, kind, round_no, value)
        out += self._advance()
        return out

    def tick(self) -> Outbox:
        out = self.vbb.resend()
        out += self.bc.tick()
        out += self._advance()
        return out

    def result(self) -> Outcome:
        return self.decision

    def state_dump(self) -> Dict[str, Any]:
        return {
            "proposal": self.proposal,
            "decision": self.decision.to_json(),
            "vbb": self.vbb.state_dump(),
            "bc": self.bc.state_dump(),
        }
