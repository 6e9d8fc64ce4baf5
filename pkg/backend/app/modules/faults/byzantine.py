"""
Byzantine node handles.

A ByzantineNode wraps an honest core (the SSBFT node or the reference node)
and rewrites whatever the core wants to send according to its strategy. The
world still stamps the true source on every envelope, so a Byzantine node can
lie about content but never about who it is.
"""

import random
from typing import Any, Dict, Optional, Tuple

from pydantic_core import to_json

from app.core.models import NodeId, Outcome, PENDING, Protocol, Value
from app.modules.brb.models import BrbKind, Phase
from app.modules.faults.strategies import (
    ByzantineStrategy,
    EquivocateStrategy,
    FakeValidFalseStrategy,
    FakeValidTrueStrategy,
    RandomNoiseStrategy,
    SilentStrategy,
)
from app.modules.simnet.models import Envelope, Outbox
from app.modules.simnet.node import NodeHandle

_NOISE_KINDS = ("INIT", "ECHO", "READY", "EST", "AUX", "DEC", "junk")


def _is_own(item: Any, node_id: NodeId, phase: Phase, kind: Optional[BrbKind] = None) -> bool:
    return (
        isinstance(item, tuple)
        and len(item) == 4
        and item[1] == phase.value
        and item[2] == node_id
        and (kind is None or item[0] == kind.value)
    )


def _noise(rng: random.Random, n: int) -> Tuple[NodeId, Protocol, bytes]:
    """One frame with a well-formed header and an arbitrary body"""
    dst = rng.randrange(n)
    protocol = rng.choice(list(Protocol))
    if rng.random() < 0.5:
        return dst, protocol, bytes(rng.getrandbits(8) for _ in range(rng.randint(1, 24)))
    item = [
        rng.choice(_NOISE_KINDS),
        rng.choice(["init", "valid", rng.randint(-2, 40)]),
        rng.randint(-1, n),
        rng.choice([None, True, False, "x", [rng.randrange(n), rng.choice([True, "a", "zz"])]]),
    ]
    return dst, protocol, to_json([item[: rng.randint(1, 4)]])


def byzantine_react(
    strategy: ByzantineStrategy,
    node_id: NodeId,
    n: int,
    outbox: Outbox,
    rng: random.Random,
    gossip_dst: Optional[NodeId] = None,
) -> Outbox:
    """Rewrite an honest core's reaction into what the strategy actually sends"""
    if isinstance(strategy, SilentStrategy):
        return Outbox()
    if isinstance(strategy, RandomNoiseStrategy):
        out = Outbox()
        out.send_raw(*_noise(rng, n))
        return out

    if isinstance(strategy, EquivocateStrategy):
        out = Outbox()

        def split(item: tuple, dst: NodeId) -> tuple:
            value = strategy.v1 if dst < n // 2 else strategy.v2
            return item[:3] + ((node_id, value),)

        for protocol, item in outbox.fresh:
            if protocol == Protocol.BRB and _is_own(item, node_id, Phase.INIT, BrbKind.INIT):
                for dst in range(n):
                    out.send(dst, protocol, split(item, dst))
            else:
                out.broadcast(protocol, item)
        for protocol, item in outbox.gossip:
            if protocol == Protocol.BRB and _is_own(item, node_id, Phase.INIT, BrbKind.INIT):
                if gossip_dst is not None:
                    out.send(gossip_dst, protocol, split(item, gossip_dst))
            else:
                out.restate(protocol, item)
        out.targeted.extend(outbox.targeted)
        out.raw.extend(outbox.raw)
        return out

    if isinstance(strategy, (FakeValidTrueStrategy, FakeValidFalseStrategy)):
        forced = isinstance(strategy, FakeValidTrueStrategy)
        fake = (node_id, forced)

        def rewrite(protocol: Protocol, item: Any) -> Any:
            if protocol == Protocol.BRB and _is_own(item, node_id, Phase.VALID):
                return item[:3] + (fake,)
            return item

        out = Outbox()
        out.fresh = [(p, rewrite(p, item)) for p, item in outbox.fresh]
        out.gossip = [(p, rewrite(p, item)) for p, item in outbox.gossip]
        out.targeted = [(dst, p, rewrite(p, item)) for dst, p, item in outbox.targeted]
        out.raw = list(outbox.raw)
        return out

    # Collusion runs the honest protocol on its own value
    return outbox


class ByzantineNode(NodeHandle):
    byzantine = True

    def __init__(self, core: NodeHandle, strategy: ByzantineStrategy, n: int, seed: int = 0):
        self.node_id = core.node_id
        super().__init__()
        self.core = core
        self.strategy = strategy
        self.n = n
        self.ticks = not isinstance(strategy, SilentStrategy)
        noise_seed = strategy.seed if isinstance(strategy, RandomNoiseStrategy) else seed
        self.rng = random.Random(f"byzantine:{noise_seed}:{self.node_id}")
        self._cursor = 0

    def _react(self, outbox: Outbox, gossip_dst: Optional[NodeId] = None) -> Outbox:
        return byzantine_react(self.strategy, self.node_id, self.n, outbox, self.rng, gossip_dst)

    def propose(self, value: Optional[Value]) -> Outbox:
        if value is None or not self.strategy.runs_core:
            return Outbox()
        return self._react(self.core.propose(value))

    def on_envelope(self, envelope: Envelope) -> Outbox:
        if not self.strategy.runs_core:
            return Outbox()
        return self._react(self.core.on_envelope(envelope))

    def tick(self) -> Outbox:
        gossip_dst = self._cursor
        self._cursor = (self._cursor + 1) % self.n
        if not self.strategy.runs_core:
            return self._react(Outbox())
        out = self._react(self.core.tick(), gossip_dst)
        if isinstance(self.strategy, (FakeValidTrueStrategy, FakeValidFalseStrategy)):
            forced = isinstance(self.strategy, FakeValidTrueStrategy)
            out.restate(Protocol.BRB, (BrbKind.INIT.value, Phase.VALID.value, self.node_id, (self.node_id, forced)))
        return out

    def reset(self, epoch: int) -> None:
        self.core.reset(epoch)
        self._cursor = 0

    def result(self) -> Outcome:
        return self.core.result() if self.strategy.runs_core else PENDING

    def state_dump(self) -> Dict[str, Any]:
        return {"strategy": self.strategy.kind, "core": self.core.state_dump()}
