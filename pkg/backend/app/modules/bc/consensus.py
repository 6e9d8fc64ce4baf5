"""
Binary consensus object (BV rounds, AUX exchange, common coin).

Round r: BV-broadcast the estimate, send AUX with the first accepted value, wait
for AUX values from n−t nodes that all lie in bin_values, then consult the coin.
A unique value b becomes the estimate and is decided when it equals the coin;
otherwise the coin becomes the estimate. Decided nodes announce DEC(b): t+1
matching announcements let a lagging node adopt b, 2t+1 let a node stop
running rounds.
"""

from collections import Counter
from typing import Any, Dict, Optional
import logging

from app.core.config import settings
from app.core.exceptions import InjectionError
from app.core.models import ERROR, PENDING, NodeId, Outcome, Protocol, SystemParams, thresholds
from app.modules.bc.coin import BaseCoin, CommonCoin
from app.modules.bc.models import DEC_ROUND, BcKind
from app.modules.bv.binary_values import BvObject
from app.modules.simnet.models import Outbox, Probe

logger = logging.getLogger(__name__)


class _Round:
    __slots__ = ("bv", "aux", "aux_sent")

    def __init__(self, bv: BvObject):
        self.bv = bv
        self.aux: Dict[NodeId, bool] = {}
        self.aux_sent: Optional[bool] = None

    def state_dump(self) -> dict:
        return {
            "bv": self.bv.state_dump(),
            "aux": {str(node): value for node, value in sorted(self.aux.items())},
            "aux_sent": self.aux_sent,
        }


class BcObject:
    def __init__(
        self,
        node_id: NodeId,
        params: SystemParams,
        seed: int = 0,
        epoch: int = 0,
        round_cap: Optional[int] = None,
        coin: Optional[BaseCoin] = None,
        probe: Optional[Probe] = None,
    ):
        self.limits = thresholds(params)
        self.node_id = node_id
        self.params = params
        self.seed = seed
        self.epoch = epoch
        self.round_cap = round_cap or settings.ROUND_CAP
        self.coin = coin or CommonCoin()
        self.probe = probe or Probe(node_id)

        self.proposal: Optional[bool] = None
        self.round = 1
        self.est: Optional[bool] = None
        self.decision: Outcome = PENDING
        self.rounds: Dict[int, _Round] = {}
        self.dec_votes: Dict[NodeId, bool] = {}
        self.started = False
        self.halted = False

    @property
    def active(self) -> bool:
        return self.proposal is not None or not self.decision.is_pending

    def _round_state(self, round_no: int) -> _Round:
        state = self.rounds.get(round_no)
        if state is None:
            wrap = lambda value, r=round_no: (Protocol.BC, (BcKind.EST.value, r, value))
            state = _Round(BvObject(self.node_id, self.params, self.probe, wrap=wrap, label=f"bc.{round_no}"))
            self.rounds[round_no] = state
        return state

    # ------------------------------------------------------------------
    # Operations
    # ------------------------------------------------------------------

    def bc_propose(self, value: bool) -> Outbox:
        if self.proposal is not None:
            return Outbox()
        self.proposal = value
        self.probe.record("bc.propose", (), value)
        return self._progress()

    def bc_result(self) -> Outcome:
        return self.decision

    def on_bc_message(self, src: NodeId, kind: BcKind, round_no: int, value: bool) -> Outbox:
        out = Outbox()
        if not 0 <= src < self.params.n:
            return out
        if kind == BcKind.DEC:
            if round_no != DEC_ROUND:
                self.probe.anomaly(f"DEC with round {round_no}")
                return out
            if self.dec_votes.get(src) == value:
                return out
            self.dec_votes[src] = value
        else:
            if not 1 <= round_no <= self.round_cap:
                self.probe.anomaly(f"{kind} for round {round_no} outside 1..{self.round_cap}")
                return out
            state = self._round_state(round_no)
            if kind == BcKind.EST:
                relay = state.bv.on_bv_message(src, value)
                if self.active:
                    out += relay
            else:
                if state.aux.get(src) == value:
                    return out
                state.aux[src] = value
        out += self._progress()
        return out

    def tick(self) -> Outbox:
        out = self._progress()
        out += self.resend()
        return out

    def resend(self) -> Outbox:
        out = Outbox()
        if not self.active:
            return out
        for round_no in sorted(self.rounds):
            if round_no > self.round:
                break
            state = self.rounds[round_no]
            out += state.bv.resend()
            if state.aux_sent is not None:
                out.restate(Protocol.BC, (BcKind.AUX.value, round_no, state.aux_sent))
        if self.decision.is_decided:
            out.restate(Protocol.BC, (BcKind.DEC.value, DEC_ROUND, self.decision.value))
        return out

    # ------------------------------------------------------------------
    # Round machinery
    # ------------------------------------------------------------------

    def _decide(self, value: bool, out: Outbox, how: str) -> None:
        self.decision = Outcome.decided(value)
        self.probe.record("bc.decide", (), value)
        logger.debug(f"Node {self.node_id}: binary consensus decided {value} ({how}, round {self.round})")
        out.broadcast(Protocol.BC, (BcKind.DEC.value, DEC_ROUND, value))

    def _check_dec(self, out: Outbox) -> None:
        counts = Counter(self.dec_votes.values())
        for value in (False, True):
            if self.decision.is_pending and counts[value] >= self.limits.plurality_t1:
                self._decide(value, out, "adopted")
            if counts[value] >= self.limits.ready_delivery:
                self.halted = True

    def _progress(self) -> Outbox:
        out = Outbox()
        if not self.active:
            return out
        if not self.started:
            self.started = True
            if self.proposal is not None:
                self.est = self.proposal
            elif self.decision.is_decided and isinstance(self.decision.value, bool):
                self.est = self.decision.value
            else:
                self.est = False
            if self.decision.is_decided:
                out.broadcast(Protocol.BC, (BcKind.DEC.value, DEC_ROUND, self.decision.value))

        self._check_dec(out)
        quorum = self.limits.quorum_nt
        while not self.halted:
            round_no = self.round
            if round_no > self.round_cap:
                if self.decision.is_pending:
                    self.decision = ERROR
                    self.probe.record("bc.decide", (), None)
                    logger.info(f"Node {self.node_id}: binary consensus hit the round cap {self.round_cap}")
                break
            state = self._round_state(round_no)
            if state.bv.my_value is None:
                out += state.bv.bv_broadcast(self.est)
            if state.aux_sent is None:
                if state.bv.first_accepted is None:
                    break
                state.aux_sent = state.bv.first_accepted
                out.broadcast(Protocol.BC, (BcKind.AUX.value, round_no, state.aux_sent))

            accepted = state.bv.bin_values()
            support = [value for value in state.aux.values() if value in accepted]
            if len(support) < quorum:
                break
            values = set(support)
            coin = self.coin.flip(self.seed, self.epoch, round_no)
            if len(values) == 1:
                value = values.pop()
                self.est = value
                if value == coin and self.decision.is_pending:
                    self._decide(value, out, "coin matched")
            else:
                self.est = coin
            self.round = round_no + 1
        return out

    # ------------------------------------------------------------------
    # State access
    # ------------------------------------------------------------------

    def inject(self, field: str, value: Any) -> None:
        if field == "proposal":
            if value is not None and not isinstance(value, bool):
                raise InjectionError(f"bc.proposal must be a boolean or null, got {value!r}")
            self.proposal = value
        elif field == "decision":
            try:
                decision = Outcome.from_json(value)
            except ValueError as e:
                raise InjectionError(f"bc.decision: {e}") from e
            if decision.is_decided and not isinstance(decision.value, bool):
                raise InjectionError(f"bc.decision must carry a boolean, got {decision.value!r}")
            self.decision = decision
        elif field == "round":
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise InjectionError(f"bc.round must be a positive integer, got {value!r}")
            self.round = value
        else:
            raise InjectionError(f"Unknown BC field: {field}")

    def state_dump(self) -> dict:
        return {
            "proposal": self.proposal,
            "round": self.round,
            "est": self.est,
            "decision": self.decision.to_json(),
            "rounds": {str(r): self.rounds[r].state_dump() for r in sorted(self.rounds)},
            "dec_votes": {str(node): value for node, value in sorted(self.dec_votes.items())},
            "started": self.started,
            "halted": self.halted,
        }
