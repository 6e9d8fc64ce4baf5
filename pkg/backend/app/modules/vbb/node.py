"""
Validated Byzantine broadcast node.

Holds the 2×n table of BRB instances (INIT and VALID phase per sender) and the
delivery logic that turns their outcomes into validated values, ⊠ or ⊥. The
delivery query carries the consistency tests that let a node leave corrupted
states: VALID without INIT, sender/payload mismatches, ill-formed payloads and
phases that must move on once n−t VALID deliveries exist.
"""

from typing import Any, Dict, List, Optional, Sequence, Tuple
import logging

from app.core.exceptions import InjectionError, ProtocolError
from app.core.models import ERROR, PENDING, NodeId, Outcome, SystemParams, Value, thresholds
from app.modules.brb.instance import BrbInstance
from app.modules.brb.models import BrbMessage, BrbTag, Phase
from app.modules.simnet.models import Outbox, Probe

logger = logging.getLogger(__name__)

# Value component of a completed delivery that is not a well-formed pair
_MALFORMED = object()

Snapshot = Tuple[Tuple[Optional[Outcome], ...], Tuple[Optional[Outcome], ...]]


def _pair(outcome: Optional[Outcome]) -> Optional[tuple]:
    if outcome is not None and outcome.is_decided:
        payload = outcome.value
        if isinstance(payload, tuple) and len(payload) == 2:
            return payload
    return None


class VbbNode:
    def __init__(self, node_id: NodeId, params: SystemParams, values: Sequence[Value], probe: Optional[Probe] = None):
        self.limits = thresholds(params)
        self.node_id = node_id
        self.params = params
        self.values = tuple(values)
        self._value_set = frozenset(values)
        self.probe = probe or Probe(node_id)
        self.brb: Dict[Phase, List[Optional[BrbInstance]]] = {
            Phase.INIT: [None] * params.n,
            Phase.VALID: [None] * params.n,
        }
        self._cache_key: Optional[Snapshot] = None
        self._cache: List[Outcome] = []

    def instance(self, phase: Phase, sender: NodeId, create: bool = True) -> Optional[BrbInstance]:
        inst = self.brb[phase][sender]
        if inst is None and create:
            inst = BrbInstance(BrbTag(phase, sender), self.node_id, self.params, self.probe)
            self.brb[phase][sender] = inst
        return inst

    # ------------------------------------------------------------------
    # Broadcast side
    # ------------------------------------------------------------------

    def vbb_broadcast(self, value: Value) -> Outbox:
        if value not in self._value_set:
            raise ProtocolError(f"Node {self.node_id}: {value!r} is not in the value set")
        return self.instance(Phase.INIT, self.node_id).broadcast((self.node_id, value))

    def on_brb_message(self, src: NodeId, msg: BrbMessage) -> Outbox:
        if not 0 <= msg.sender < self.params.n:
            return Outbox()
        # A sender's VALID run always follows its INIT run
        self.instance(Phase.INIT, msg.sender)
        return self.instance(msg.phase, msg.sender).on_message(src, msg)

    def vbb_tick(self) -> Outbox:
        out = Outbox()
        own = self.brb[Phase.INIT][self.node_id]
        if own is not None and self.vbb_echo(Phase.INIT):
            delivery = own.deliver()
            if not delivery.is_pending:
                pair = _pair(delivery)
                if pair is not None and pair[0] == self.node_id and pair[1] in self._value_set:
                    validated = self.vbb_eq(pair[1])
                else:
                    validated = False
                valid = self.instance(Phase.VALID, self.node_id)
                payload = (self.node_id, validated)
                # The first VALID of the epoch stands; later flips are not re-announced
                if valid.my_init is None or valid.my_init == payload:
                    out += valid.broadcast(payload)
        out += self.resend()
        return out

    def resend(self) -> Outbox:
        out = Outbox()
        for phase in (Phase.INIT, Phase.VALID):
            for inst in self.brb[phase]:
                if inst is not None:
                    out += inst.resend()
        return out

    # ------------------------------------------------------------------
    # Queries
    # ------------------------------------------------------------------

    def _snapshot(self) -> Snapshot:
        return (
            tuple(inst.deliver() if inst is not None else None for inst in self.brb[Phase.INIT]),
            tuple(inst.deliver() if inst is not None else None for inst in self.brb[Phase.VALID]),
        )

    @staticmethod
    def _components(init: Sequence[Optional[Outcome]]) -> List[Any]:
        components = []
        for outcome in init:
            if outcome is None or outcome.is_pending:
                continue
            pair = _pair(outcome)
            components.append(pair[1] if pair is not None else _MALFORMED)
        return components

    def _eq_count(self, components: List[Any], value: Value) -> int:
        return sum(1 for c in components if c is not _MALFORMED and c == value)

    def _diff_count(self, components: List[Any], value: Value) -> int:
        return sum(1 for c in components if c is _MALFORMED or c != value)

    def vbb_echo(self, phase: Phase) -> bool:
        delivered = sum(
            1 for inst in self.brb[phase] if inst is not None and not inst.deliver().is_pending
        )
        return delivered >= self.limits.quorum_nt

    def vbb_eq(self, value: Value) -> bool:
        components = self._components(self._snapshot()[0])
        return self._eq_count(components, value) >= self.limits.quorum_n2t

    def vbb_diff(self, value: Value) -> bool:
        components = self._components(self._snapshot()[0])
        return self._diff_count(components, value) >= self.limits.plurality_t1

    def vbb_deliver(self, k: NodeId) -> Outcome:
        return self.delivery_table()[k]

    def delivery_table(self) -> List[Outcome]:
        """vbb_deliver for every sender, recomputed only when a BRB outcome changed"""
        key = self._snapshot()
        if key != self._cache_key:
            self._cache = self._compute(*key)
            self._cache_key = key
        return self._cache

    def _compute(self, init: Sequence[Optional[Outcome]], valid: Sequence[Optional[Outcome]]) -> List[Outcome]:
        n = self.params.n
        limits = self.limits

        mismatch = any(
            pair is not None and pair[0] != sender
            for phase in (init, valid)
            for sender, pair in enumerate(_pair(outcome) for outcome in phase)
        )
        components = self._components(init)
        valid_echo = sum(1 for o in valid if o is not None and not o.is_pending) >= limits.quorum_nt

        table: List[Outcome] = []
        for k in range(n):
            ini, val = init[k], valid[k]
            if ini is None and val is not None:
                table.append(ERROR)
            elif mismatch:
                table.append(ERROR)
            elif ini is None or val is None or ini.is_pending or val.is_pending:
                table.append(PENDING)
            else:
                init_pair, valid_pair = _pair(ini), _pair(val)
                if init_pair is None or valid_pair is None:
                    table.append(ERROR)
                    continue
                value, validated = init_pair[1], valid_pair[1]
                if not isinstance(value, str) or value not in self._value_set or not isinstance(validated, bool):
                    table.append(ERROR)
                elif validated and self._eq_count(components, value) >= limits.quorum_n2t:
                    table.append(Outcome.decided(value))
                elif not validated and self._diff_count(components, value) >= limits.plurality_t1:
                    table.append(ERROR)
                elif valid_echo:
                    table.append(ERROR)
                else:
                    table.append(PENDING)
        return table

    # ------------------------------------------------------------------
    # State access
    # ------------------------------------------------------------------

    def inject(self, parts: Sequence[str], value: Any) -> None:
        """parts = [phase, sender] or [phase, sender, field...]"""
        if len(parts) < 2:
            raise InjectionError(f"BRB path needs a phase and a sender: {'.'.join(parts)}")
        try:
            phase = Phase(parts[0])
            sender = int(parts[1])
        except ValueError as e:
            raise InjectionError(f"Bad BRB path {'.'.join(parts)}: {e}") from e
        if not 0 <= sender < self.params.n:
            raise InjectionError(f"BRB sender {sender} out of range")
        if len(parts) == 2:
            if value is not None:
                raise InjectionError("A whole BRB instance can only be reset to null")
            self.brb[phase][sender] = None
            return
        self.instance(phase, sender).inject(".".join(parts[2:]), value)

    def state_dump(self) -> dict:
        return {
            phase.value: [inst.state_dump() if inst is not None else None for inst in self.brb[phase]]
            for phase in (Phase.INIT, Phase.VALID)
        }
