"""
Transient-fault injection.

An InjectionPlan corrupts the state of chosen correct nodes and pre-loads
channel buffers before the first step of an epoch. Only data changes; the
handlers stay untouched. Values may be semantically illegal but must fit the
state container, otherwise the plan is rejected with InjectionError.
"""

import copy
import random
from collections import Counter
from typing import Any, List, Optional, Sequence, Union
import logging

from pydantic import BaseModel, ConfigDict, Field, model_validator
from pydantic_core import to_json

from app.core.exceptions import InjectionError
from app.core.models import NodeId, Protocol, Value
from app.core.trace import TraceKind
from app.modules.brb.models import Phase
from app.modules.simnet.models import Envelope, Probe
from app.modules.simnet.world import SimWorld

logger = logging.getLogger(__name__)


class FieldMutation(BaseModel):
    """Overwrite one field, e.g. {"path": "brb.valid.5.delivered", "value": [5, true]}"""

    model_config = ConfigDict(extra="forbid")

    path: str = Field(..., min_length=1)
    value: Any = None


class RandomizeMutation(BaseModel):
    """Redraw every corruptible field of the node from a seeded generator"""

    model_config = ConfigDict(extra="forbid")

    randomize: int


class ChannelMutation(BaseModel):
    """One envelope pre-loaded into channel (src, dst); items are encoded, raw is sent as text bytes"""

    model_config = ConfigDict(extra="forbid")

    src: int = Field(..., ge=0)
    dst: int = Field(..., ge=0)
    protocol: Protocol
    items: Optional[List[Any]] = None
    raw: Optional[str] = None

    @model_validator(mode="after")
    def check_body(self):
        if (self.items is None) == (self.raw is None):
            raise ValueError("a channel mutation needs exactly one of items or raw")
        return self

    def body(self) -> bytes:
        return self.raw.encode() if self.raw is not None else to_json(self.items)


class InjectionPlan(BaseModel):
    model_config = ConfigDict(extra="forbid")

    targets: List[int] = Field(default_factory=list)
    mutations: List[Union[FieldMutation, RandomizeMutation]] = Field(default_factory=list)
    channel_mutations: List[ChannelMutation] = Field(default_factory=list)


# ----------------------------------------------------------------------
# Randomize
# ----------------------------------------------------------------------

def _payload(rng: random.Random, n: int, values: Sequence[Value], phase: Phase, sender: NodeId) -> Any:
    """A payload drawn mostly from legal shapes, sometimes from illegal ones"""
    roll = rng.random()
    if roll < 0.6:
        if phase == Phase.INIT:
            return [sender, rng.choice(values)]
        return [sender, rng.random() < 0.5]
    choices = [
        [rng.randrange(n), rng.choice(values)],
        [sender, "zz-not-a-value"],
        [sender, rng.randint(-3, 3)],
        "junk",
        7,
        [sender, rng.choice(values), True],
    ]
    return rng.choice(choices)


def _maybe(rng: random.Random, draw, p_none: float = 0.4) -> Any:
    return None if rng.random() < p_none else draw()


def _node_subset(rng: random.Random, n: int) -> List[NodeId]:
    return sorted(k for k in range(n) if rng.random() < 0.5)


def randomize_node(node: Any, rng: random.Random) -> int:
    """Corrupt BRB, BV and mvc fields plus the BC proposal and decision. Returns the mutation count."""
    n = node.params.n
    values = list(node.values)
    count = 0

    def put(path: str, value: Any) -> None:
        nonlocal count
        node.inject(path, value)
        count += 1

    for phase in (Phase.INIT, Phase.VALID):
        for sender in range(n):
            base = f"brb.{phase.value}.{sender}"
            if rng.random() < 0.3:
                put(base, None)
                continue
            draw = lambda: _payload(rng, n, values, phase, sender)
            put(f"{base}.my_init", _maybe(rng, draw, 0.7 if sender != node.node_id else 0.3))
            put(f"{base}.init_view", _maybe(rng, draw))
            put(f"{base}.echoed", _maybe(rng, draw))
            put(f"{base}.readied", _maybe(rng, draw))
            put(f"{base}.delivered", _maybe(rng, draw, 0.6))
            put(f"{base}.inconsistent", rng.random() < 0.1)
            put(f"{base}.echoes", {str(k): draw() for k in _node_subset(rng, n)})
            put(f"{base}.readies", {str(k): draw() for k in _node_subset(rng, n)})

    bools = lambda: sorted(v for v in (False, True) if rng.random() < 0.5)
    put("bv.active", rng.random() < 0.5)
    put("bv.my_value", _maybe(rng, lambda: rng.random() < 0.5))
    put("bv.received.true", _node_subset(rng, n))
    put("bv.received.false", _node_subset(rng, n))
    put("bv.relayed", bools())
    put("bv.bin_values", bools())
    put("bv.first_accepted", _maybe(rng, lambda: rng.random() < 0.5))

    put("bc.proposal", _maybe(rng, lambda: rng.random() < 0.5))
    put("bc.decision", rng.choice(["pending", "error", {"tag": "decided", "value": rng.random() < 0.5}]))

    put("mvc.same_value", _maybe(rng, lambda: rng.random() < 0.5))
    put("mvc.proposal", _maybe(rng, lambda: rng.choice(values + ["zz-not-a-value"])))
    return count


# ----------------------------------------------------------------------
# Plan application
# ----------------------------------------------------------------------

def _mutate(node: Any, target: NodeId, mutations: Sequence[Union[FieldMutation, RandomizeMutation]]) -> List[str]:
    summaries = []
    for mutation in mutations:
        if isinstance(mutation, RandomizeMutation):
            count = randomize_node(node, random.Random(f"{mutation.randomize}:{target}"))
            summaries.append(f"randomize({mutation.randomize}): {count} fields")
        else:
            node.inject(mutation.path, mutation.value)
            summaries.append(f"{mutation.path} := {mutation.value!r}")
    return summaries


def apply_injection(world: SimWorld, plan: InjectionPlan) -> SimWorld:
    """Apply plan to world; only allowed before the first step of an epoch"""
    if world.clock != world.epoch_started_at:
        raise InjectionError(
            f"Injection must happen at the start of an epoch (step {world.epoch_started_at}, now {world.clock})"
        )

    for target in plan.targets:
        if not 0 <= target < world.n:
            raise InjectionError(f"Injection target {target} out of range")
        if world.nodes[target].byzantine:
            raise InjectionError(f"Injection target {target} is Byzantine")
        if not hasattr(world.nodes[target], "inject"):
            raise InjectionError(f"Node {target} does not accept state injection")

    per_channel = Counter((m.src, m.dst) for m in plan.channel_mutations)
    for (src, dst), count in per_channel.items():
        if src >= world.n or dst >= world.n:
            raise InjectionError(f"Channel {src}->{dst} out of range")
        if world.in_flight(src, dst) + count > world.capacity:
            raise InjectionError(f"Channel {src}->{dst} cannot hold {count} more envelopes")

    # Dry run on replicas so that a bad mutation leaves the world untouched
    try:
        for target in plan.targets:
            node = world.nodes[target]
            # Replicas get a detached event sink so the copy stops at the world
            replica = copy.deepcopy(node, {id(node.probe): Probe(node.node_id)})
            _mutate(replica, target, plan.mutations)
    except InjectionError as e:
        logger.error(f"Injection rejected: {e}")
        raise

    for target in plan.targets:
        for summary in _mutate(world.nodes[target], target, plan.mutations):
            world.trace.append(world.clock, TraceKind.INJECT, target, target, None, summary)

    for mutation in plan.channel_mutations:
        world.enqueue(Envelope(mutation.src, mutation.dst, mutation.protocol, world.epoch, mutation.body()))
        world.trace.append(world.clock, TraceKind.INJECT, mutation.src, mutation.dst,
                           str(mutation.protocol), "pre-loaded envelope")

    logger.info(
        f"Applied injection: {len(plan.targets)} target(s), {len(plan.mutations)} mutation(s), "
        f"{len(plan.channel_mutations)} channel envelope(s)"
    )
    return world
