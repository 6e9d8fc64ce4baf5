"""
Property checkers.

Each checker reads the events recorded during one epoch plus the state of the
correct nodes at the end of it and returns a Verdict. Closure properties only
hold from a post-recycling start and are skipped on injected epochs; the
completion properties and no-intrusion are checked on every epoch.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, List, Optional, Set, Tuple

from app.core.models import PENDING, NodeId, Outcome, Value
from app.modules.brb.models import Phase
from app.modules.harness.report import Verdict
from app.modules.simnet.models import Event
from app.modules.simnet.world import SimWorld

PROPERTY_KEYS = (
    "brb.validity",
    "brb.integrity",
    "brb.no_duplicity",
    "brb.completion_1",
    "brb.completion_2",
    "bv.validity",
    "bv.uniformity",
    "bv.completion",
    "vbb.completion",
    "vbb.uniformity",
    "vbb.justification",
    "vbb.obligation",
    "bc.completion",
    "bc.agreement",
    "bc.validity",
    "bc.no_intrusion",
)

LIVENESS_KEY = "liveness"

CLOSURE_KEYS = frozenset({
    "brb.validity",
    "brb.integrity",
    "brb.no_duplicity",
    "brb.completion_2",
    "bv.validity",
    "bv.uniformity",
    "vbb.uniformity",
    "vbb.justification",
    "vbb.obligation",
    "bc.agreement",
    "bc.validity",
})


@dataclass
class EpochContext:
    world: SimWorld
    injected: bool
    proposals: Dict[NodeId, Value]
    byzantine_values: FrozenSet[Value] = frozenset()
    events: List[Event] = field(default_factory=list)

    @property
    def correct(self) -> List[NodeId]:
        return self.world.correct_ids

    @property
    def step(self) -> int:
        return self.world.clock

    def node(self, k: NodeId):
        return self.world.nodes[k]

    def correct_events(self, kind: str) -> List[Event]:
        correct = set(self.correct)
        return [e for e in self.events if e.kind == kind and e.node in correct]

    def unanimous(self) -> Optional[Value]:
        values = {self.proposals[k] for k in self.correct if k in self.proposals}
        return values.pop() if len(values) == 1 else None


def brb_outcome(node, phase: Phase, sender: NodeId) -> Outcome:
    inst = node.vbb.brb[phase][sender]
    return inst.deliver() if inst is not None else PENDING


def _tags(n: int):
    return [(phase, sender) for phase in (Phase.INIT, Phase.VALID) for sender in range(n)]


def broadcast_tags(world: SimWorld) -> List[Tuple[Phase, NodeId]]:
    """Instances a correct sender has broadcast on"""
    tags = []
    for sender in world.correct_ids:
        for phase in (Phase.INIT, Phase.VALID):
            inst = world.nodes[sender].vbb.brb[phase][sender]
            if inst is not None and inst.my_init is not None:
                tags.append((phase, sender))
    return tags


# ----------------------------------------------------------------------
# BRB
# ----------------------------------------------------------------------

def check_brb_validity(ctx: EpochContext) -> Verdict:
    correct = set(ctx.correct)
    broadcasts = {
        tuple(e.key): e.value for e in ctx.correct_events("brb.broadcast") if e.key[1] == e.node
    }
    for e in ctx.correct_events("brb.deliver"):
        key = tuple(e.key)
        if key[1] not in correct:
            continue
        if key not in broadcasts or broadcasts[key] != e.value:
            return Verdict.failed(e.step, [e.node, key[1]], [e.value, broadcasts.get(key)],
                                  f"{key[0]} delivery not broadcast by its sender")
    return Verdict.passed()


def check_brb_integrity(ctx: EpochContext) -> Verdict:
    seen: Dict[Tuple, Event] = {}
    for e in ctx.correct_events("brb.deliver"):
        key = (e.node,) + tuple(e.key)
        if key in seen:
            return Verdict.failed(e.step, [e.node], [seen[key].value, e.value], "delivered twice")
        seen[key] = e
    for (node_id, phase, sender), e in seen.items():
        outcome = brb_outcome(ctx.node(node_id), Phase(phase), sender)
        if outcome != Outcome.decided(e.value):
            return Verdict.failed(ctx.step, [node_id, sender], [e.value, str(outcome)],
                                  "delivery changed after it was made")
    return Verdict.passed()


def check_brb_no_duplicity(ctx: EpochContext) -> Verdict:
    first: Dict[Tuple, Event] = {}
    for e in ctx.correct_events("brb.deliver"):
        key = tuple(e.key)
        if key in first and first[key].value != e.value:
            return Verdict.failed(e.step, [first[key].node, e.node], [first[key].value, e.value],
                                  f"two payloads delivered for {key[0]}/{key[1]}")
        first.setdefault(key, e)
    return Verdict.passed()


def check_brb_completion_1(ctx: EpochContext) -> Verdict:
    for phase, sender in broadcast_tags(ctx.world):
        missing = [k for k in ctx.correct if brb_outcome(ctx.node(k), phase, sender).is_pending]
        if missing:
            return Verdict.failed(ctx.step, missing, [phase.value, sender], "correct sender not delivered")
    return Verdict.passed()


def check_brb_completion_2(ctx: EpochContext) -> Verdict:
    for phase, sender in _tags(ctx.world.n):
        outcomes = [brb_outcome(ctx.node(k), phase, sender) for k in ctx.correct]
        if any(o.is_decided for o in outcomes):
            missing = [k for k, o in zip(ctx.correct, outcomes) if o.is_pending]
            if missing:
                return Verdict.failed(ctx.step, missing, [phase.value, sender], "delivered elsewhere")
    return Verdict.passed()


# ----------------------------------------------------------------------
# BV
# ----------------------------------------------------------------------

def check_bv_validity(ctx: EpochContext) -> Verdict:
    broadcast: Set[Tuple] = {(e.key, e.value) for e in ctx.correct_events("bv.broadcast")}
    for e in ctx.correct_events("bv.accept"):
        if (e.key, e.value) not in broadcast:
            return Verdict.failed(e.step, [e.node], [e.key[0], e.value], "accepted a value no correct node broadcast")
    return Verdict.passed()


def _mvc_bv(ctx: EpochContext) -> Optional[Dict[NodeId, FrozenSet[bool]]]:
    nodes = [ctx.node(k) for k in ctx.correct]
    if any(getattr(node, "bv", None) is None for node in nodes):
        return None
    return {k: node.bv.bin_values() for k, node in zip(ctx.correct, nodes)}


def check_bv_uniformity(ctx: EpochContext) -> Verdict:
    views = _mvc_bv(ctx)
    if views is None:
        return Verdict.skipped()
    distinct = {views[k] for k in ctx.correct}
    if len(distinct) > 1:
        return Verdict.failed(ctx.step, list(ctx.correct), [sorted(views[k]) for k in ctx.correct],
                              "bin_values differ")
    return Verdict.passed()


def check_bv_completion(ctx: EpochContext) -> Verdict:
    views = _mvc_bv(ctx)
    if views is None:
        return Verdict.skipped()
    empty = [k for k in ctx.correct if not views[k]]
    if empty:
        return Verdict.failed(ctx.step, empty, [], "bin_values still empty")
    return Verdict.passed()


# ----------------------------------------------------------------------
# VBB
# ----------------------------------------------------------------------

def _tables(ctx: EpochContext) -> Dict[NodeId, List[Outcome]]:
    return {k: ctx.node(k).vbb.delivery_table() for k in ctx.correct}


def check_vbb_completion(ctx: EpochContext) -> Verdict:
    tables = _tables(ctx)
    for sender in ctx.correct:
        missing = [k for k in ctx.correct if tables[k][sender].is_pending]
        if missing:
            return Verdict.failed(ctx.step, missing + [sender], [], f"no delivery from correct sender {sender}")
    return Verdict.passed()


def check_vbb_uniformity(ctx: EpochContext) -> Verdict:
    tables = _tables(ctx)
    for sender in range(ctx.world.n):
        seen = {k: tables[k][sender] for k in ctx.correct if not tables[k][sender].is_pending}
        if len(set(seen.values())) > 1:
            return Verdict.failed(ctx.step, sorted(seen) + [sender], [str(o) for o in seen.values()],
                                  f"deliveries from sender {sender} differ")
    return Verdict.passed()


def check_vbb_justification(ctx: EpochContext) -> Verdict:
    broadcast = {
        e.value[1] for e in ctx.correct_events("brb.broadcast")
        if e.key[0] == Phase.INIT and isinstance(e.value, tuple) and len(e.value) == 2
    }
    tables = _tables(ctx)
    for k in ctx.correct:
        for sender, outcome in enumerate(tables[k]):
            if outcome.is_decided and outcome.value not in broadcast:
                return Verdict.failed(ctx.step, [k, sender], [outcome.value], "delivered a value no correct node broadcast")
    return Verdict.passed()


def check_vbb_obligation(ctx: EpochContext) -> Verdict:
    value = ctx.unanimous()
    if value is None:
        return Verdict.passed()
    tables = _tables(ctx)
    expected = Outcome.decided(value)
    for k in ctx.correct:
        for sender in ctx.correct:
            if tables[k][sender] != expected:
                return Verdict.failed(ctx.step, [k, sender], [value, str(tables[k][sender])],
                                      "unanimous value not delivered")
    return Verdict.passed()


# ----------------------------------------------------------------------
# Multivalued consensus
# ----------------------------------------------------------------------

def _results(ctx: EpochContext) -> Dict[NodeId, Outcome]:
    return {k: ctx.node(k).result() for k in ctx.correct}


def check_bc_completion(ctx: EpochContext) -> Verdict:
    pending = [k for k, o in _results(ctx).items() if o.is_pending]
    if pending:
        return Verdict.failed(ctx.step, pending, [], "no decision")
    return Verdict.passed()


def check_bc_agreement(ctx: EpochContext) -> Verdict:
    results = _results(ctx)
    settled = {k: o for k, o in results.items() if not o.is_pending}
    if len(set(settled.values())) > 1:
        return Verdict.failed(ctx.step, sorted(settled), [str(o) for o in settled.values()], "decisions differ")
    return Verdict.passed()


def check_bc_validity(ctx: EpochContext) -> Verdict:
    value = ctx.unanimous()
    if value is None:
        return Verdict.passed()
    wrong = {k: o for k, o in _results(ctx).items() if o != Outcome.decided(value)}
    if wrong:
        return Verdict.failed(ctx.step, sorted(wrong), [value] + [str(o) for o in wrong.values()],
                              "unanimous proposal not decided")
    return Verdict.passed()


def check_bc_no_intrusion(ctx: EpochContext) -> Verdict:
    correct_values = {ctx.proposals[k] for k in ctx.correct if k in ctx.proposals}
    intruders = ctx.byzantine_values - correct_values
    for k, outcome in _results(ctx).items():
        if outcome.is_decided and outcome.value in intruders:
            return Verdict.failed(ctx.step, [k], [outcome.value], "decided a value proposed only by Byzantine nodes")
    return Verdict.passed()


CHECKERS: Dict[str, Callable[[EpochContext], Verdict]] = {
    "brb.validity": check_brb_validity,
    "brb.integrity": check_brb_integrity,
    "brb.no_duplicity": check_brb_no_duplicity,
    "brb.completion_1": check_brb_completion_1,
    "brb.completion_2": check_brb_completion_2,
    "bv.validity": check_bv_validity,
    "bv.uniformity": check_bv_uniformity,
    "bv.completion": check_bv_completion,
    "vbb.completion": check_vbb_completion,
    "vbb.uniformity": check_vbb_uniformity,
    "vbb.justification": check_vbb_justification,
    "vbb.obligation": check_vbb_obligation,
    "bc.completion": check_bc_completion,
    "bc.agreement": check_bc_agreement,
    "bc.validity": check_bc_validity,
    "bc.no_intrusion": check_bc_no_intrusion,
}


def check_epoch(ctx: EpochContext, live: bool) -> Dict[str, Verdict]:
    """Run every checker in catalog order; closure checks are skipped on injected epochs"""
    verdicts: Dict[str, Verdict] = {}
    for key in PROPERTY_KEYS:
        if ctx.injected and key in CLOSURE_KEYS:
            verdicts[key] = Verdict.skipped()
        else:
            verdicts[key] = CHECKERS[key](ctx)
    if live:
        verdicts[LIVENESS_KEY] = Verdict.passed()
    else:
        pending = [k for k, o in _results(ctx).items() if o.is_pending]
        verdicts[LIVENESS_KEY] = Verdict.failed(ctx.step, pending, [], "step budget exhausted")
    return verdicts


def settled(world: SimWorld, closure: bool) -> bool:
    """
    Epoch end condition: every correct node decided, delivered from every
    correct sender, holds a non-empty mvc bin_values and every correct
    sender's broadcast instances completed. On post-recycling epochs the
    eventual closure properties (BRB completion of any delivered instance,
    identical bin_values) must have settled too.
    """
    correct = world.correct_ids
    nodes = [world.nodes[k] for k in correct]
    if any(node.result().is_pending for node in nodes):
        return False
    for node in nodes:
        table = node.vbb.delivery_table()
        if any(table[k].is_pending for k in correct):
            return False
        if node.bv is not None and not node.bv.bin_values():
            return False
    for phase, sender in broadcast_tags(world):
        if any(brb_outcome(node, phase, sender).is_pending for node in nodes):
            return False
    if not closure:
        return True
    for phase, sender in _tags(world.n):
        outcomes = [brb_outcome(node, phase, sender) for node in nodes]
        if any(o.is_decided for o in outcomes) and any(o.is_pending for o in outcomes):
            return False
    if nodes and nodes[0].bv is not None:
        if len({node.bv.bin_values() for node in nodes}) > 1:
            return False
    return True
