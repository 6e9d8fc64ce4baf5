"""
Multivalued consensus node.

Reduces multivalued consensus to one VBB exchange, one binary consensus and one
BV object. Once n−t VBB deliveries exist the node proposes sameValue() to the
binary consensus and BV-broadcasts the same boolean; the result query reads the
binary decision back through the VBB deliveries and rejects decisions that
could only stem from a corrupted binary object.
"""

from collections import Counter
from typing import Any, Dict, Optional, Sequence
import logging

from app.core.exceptions import InjectionError, MalformedFrameError, ProtocolError
from app.core.models import ERROR, PENDING, NodeId, Outcome, Protocol, SystemParams, Value, thresholds
from app.core.schema_registry import get_schema
from app.modules.bc.coin import BaseCoin
from app.modules.bc.consensus import BcObject
from app.modules.brb.models import Phase
from app.modules.bv.binary_values import BvObject
from app.modules.simnet.models import Envelope, Outbox, Probe
from app.modules.simnet.node import NodeHandle
from app.modules.vbb.node import VbbNode

logger = logging.getLogger(__name__)


class MvcNode(NodeHandle):
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
        self._value_set = frozenset(values)
        self.seed = seed
        self.round_cap = round_cap
        self.coin = coin
        self.reset(epoch)

    def reset(self, epoch: int) -> None:
        self.epoch = epoch
        self.proposal: Optional[Value] = None
        self.same_value_latch: Optional[bool] = None
        self.vbb = VbbNode(self.node_id, self.params, self.values, self.probe)
        self.bv = BvObject(self.node_id, self.params, self.probe)
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
        self.bv.probe = probe
        self.bc.probe = probe
        for state in self.bc.rounds.values():
            state.bv.probe = probe

    # ------------------------------------------------------------------
    # Operations
    # ------------------------------------------------------------------

    def propose(self, value: Value) -> Outbox:
        if value not in self._value_set:
            raise ProtocolError(f"Node {self.node_id}: cannot propose {value!r}, not in the value set")
        if self.proposal is None or self.proposal not in self._value_set:
            if self.proposal is not None:
                logger.debug(f"Node {self.node_id}: replacing unusable proposal {self.proposal!r}")
            self.proposal = value
            self.probe.record("mvc.propose", (), value)
            return self.vbb.vbb_broadcast(value)
        if self.proposal == value:
            return self.vbb.vbb_broadcast(value)
        logger.warning(f"Node {self.node_id}: ignoring proposal {value!r}, already proposed {self.proposal!r}")
        self.probe.anomaly("conflicting proposal")
        return Outbox()

    def _decided_counts(self) -> Counter:
        return Counter(o.value for o in self.vbb.delivery_table() if o.is_decided)

    def mc_echo(self) -> bool:
        delivered = sum(1 for o in self.vbb.delivery_table() if not o.is_pending)
        return delivered >= self.limits.quorum_nt

    def same_value(self) -> bool:
        counts = self._decided_counts()
        supported = any(count >= self.limits.quorum_n2t for count in counts.values())
        return supported and len(counts) == 1

    def result(self) -> Outcome:
        if not self.bc.active:
            return PENDING
        decision = self.bc.bc_result()
        if decision.is_pending:
            return PENDING
        if decision.is_error or decision.value is not True:
            return ERROR
        counts = self._decided_counts()
        candidates = [(-count, value) for value, count in counts.items() if count >= self.limits.quorum_n2t]
        if candidates:
            return Outcome.decided(min(candidates)[1])
        if self.mc_echo() or True not in self.bv.bin_values():
            return ERROR
        return PENDING

    def mvc_tick(self) -> Outbox:
        out = Outbox()
        own = self.vbb.brb[Phase.INIT][self.node_id]
        if self.proposal in self._value_set and (own is None or own.my_init is None):
            out += self.vbb.vbb_broadcast(self.proposal)
        out += self.vbb.vbb_tick()
        if self.mc_echo():
            if self.same_value_latch is None:
                self.same_value_latch = self.same_value()
                self.probe.record("mvc.same_value", (), self.same_value_latch)
                logger.debug(f"Node {self.node_id}: sameValue latched as {self.same_value_latch}")
            if not self.bc.active:
                out += self.bc.bc_propose(self.same_value_latch)
            out += self.bv.bv_broadcast(self.same_value_latch)
        out += self.bc.tick()
        out += self.bv.resend()
        return out

    # ------------------------------------------------------------------
    # NodeHandle
    # ------------------------------------------------------------------

    def tick(self) -> Outbox:
        return self.mvc_tick()

    def on_envelope(self, envelope: Envelope) -> Outbox:
        try:
            items = get_schema(envelope.protocol).decode(envelope.body, self.params.n)
        except MalformedFrameError as e:
            self.probe.anomaly(f"dropped frame from {envelope.src}: {e}")
            return Outbox()

        out = Outbox()
        src = envelope.src
        if envelope.protocol == Protocol.BRB:
            for msg in items:
                out += self.vbb.on_brb_message(src, msg)
        elif envelope.protocol == Protocol.BV:
            for (value,) in items:
                out += self.bv.on_bv_message(src, value)
        else:
            for kind, round_no, value in items:
                out += self.bc.on_bc_message(src, kind, round_no, value)
        return out

    def inject(self, path: str, value: Any) -> None:
        """Overwrite one state field addressed as layer.field[.subfield]"""
        head, _, rest = path.partition(".")
        if not rest:
            raise InjectionError(f"Injection path too short: {path}")
        if head == "brb":
            self.vbb.inject(rest.split("."), value)
        elif head == "bv":
            self.bv.inject(rest, value)
        elif head == "bc":
            self.bc.inject(rest, value)
        elif head == "mvc" and rest == "same_value":
            if value is not None and not isinstance(value, bool):
                raise InjectionError(f"mvc.same_value must be a boolean or null, got {value!r}")
            self.same_value_latch = value
        elif head == "mvc" and rest == "proposal":
            if value is not None and not isinstance(value, str):
                raise InjectionError(f"mvc.proposal must be a string or null, got {value!r}")
            self.proposal = value
        else:
            raise InjectionError(f"Unknown injection path: {path}")

    def state_dump(self) -> Dict[str, Any]:
        return {
            "proposal": self.proposal,
            "same_value": self.same_value_latch,
            "brb": self.vbb.state_dump(),
            "bv": self.bv.state_dump(),
            "bc": self.bc.state_dump(),
        }
