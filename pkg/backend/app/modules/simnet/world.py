"""
SimWorld - deterministic discrete-event asynchronous network.

Every call to step() executes exactly one atomic step: the delivery of one
envelope to its destination node, or one do-forever iteration of one node.
Outputs are packed into one envelope per (destination, layer) and enqueued on
bounded channels; a full channel drops the newest envelope.
"""

import random
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple
import logging

from app.core.config import settings
from app.core.models import NodeId, Protocol, SystemParams, thresholds
from app.core.exceptions import ParameterError
from app.core.schema_registry import get_schema
from app.core.trace import TraceKind, TraceLog
from app.modules.simnet.channel import Channel
from app.modules.simnet.models import Action, Envelope, Event, Outbox, Probe, RunResult
from app.modules.simnet.node import NodeHandle
from app.modules.simnet.scheduler import Policy, Scheduler

logger = logging.getLogger(__name__)

_PROTOCOL_ORDER = {protocol: index for index, protocol in enumerate(Protocol)}


class SimWorld:
    def __init__(
        self,
        params: SystemParams,
        nodes: Sequence[NodeHandle],
        seed: int = 0,
        channel_capacity: Optional[int] = None,
        tick_weight: Optional[float] = None,
        starvation_bound: Optional[int] = None,
        policy: Optional[Policy] = None,
        record_trace: bool = False,
    ):
        self.params = params
        self.thresholds = thresholds(params)
        n = params.n
        if len(nodes) != n:
            raise ParameterError(f"Expected {n} node handles, got {len(nodes)}")
        byzantine = [node.node_id for node in nodes if node.byzantine]
        if len(byzantine) > params.t:
            raise ParameterError(f"{len(byzantine)} Byzantine nodes exceed t={params.t}")

        self.nodes: List[NodeHandle] = list(nodes)
        self.seed = seed
        self.rng = random.Random(seed)
        self.clock = 0
        self.epoch = 0
        self.epoch_started_at = 0
        self.capacity = channel_capacity or settings.CHANNEL_CAPACITY
        self.channels: Dict[Tuple[NodeId, NodeId], Channel] = {
            (src, dst): Channel(src, dst, self.capacity) for src in range(n) for dst in range(n)
        }
        self._nonempty: Set[Tuple[NodeId, NodeId]] = set()
        self._tickers = [node.node_id for node in self.nodes if node.ticks]
        self._gossip_cursor = [0] * n
        self.trace = TraceLog(enabled=record_trace)
        self.events: List[Event] = []
        self.drops = 0
        self.stale = 0
        self.quiescent = False

        if starvation_bound is None:
            starvation_bound = settings.starvation_bound_for(n)
        self.scheduler = Scheduler(
            self.rng,
            settings.TICK_WEIGHT if tick_weight is None else tick_weight,
            max(starvation_bound, n * n),
            policy,
        )

        for node in self.nodes:
            node.bind_probe(Probe(node.node_id, clock=self._now, epoch=self._current_epoch, events=self.events))

        logger.debug(
            f"SimWorld created: n={n}, t={params.t}, seed={seed}, capacity={self.capacity}, "
            f"byzantine={byzantine}"
        )

    def _now(self) -> int:
        return self.clock

    def _current_epoch(self) -> int:
        return self.epoch

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def correct_ids(self) -> List[NodeId]:
        return [node.node_id for node in self.nodes if not node.byzantine]

    @property
    def byzantine_ids(self) -> List[NodeId]:
        return [node.node_id for node in self.nodes if node.byzantine]

    @property
    def anomalies(self) -> int:
        return sum(node.probe.anomalies for node in self.nodes)

    def in_flight(self, src: NodeId, dst: NodeId) -> int:
        return len(self.channels[(src, dst)])

    def enabled_actions(self) -> List[Action]:
        actions = [Action.deliver(src, dst) for src, dst in sorted(self._nonempty)]
        actions.extend(Action.tick(node) for node in self._tickers)
        return actions

    # ------------------------------------------------------------------
    # Stepping
    # ------------------------------------------------------------------

    def step(self) -> "SimWorld":
        action = self.scheduler.choose(self, self.clock, sorted(self._nonempty), self._tickers)
        if action is None:
            if not self.quiescent:
                self.trace.append(self.clock, TraceKind.QUIESCENT, summary="no enabled action")
                logger.debug(f"World quiescent at step {self.clock}")
            self.quiescent = True
            return self

        self.quiescent = False
        if action.kind == "deliver":
            self._deliver(action.src, action.dst)
        else:
            self._tick(action.src)
        self.clock += 1
        return self

    def _deliver(self, src: NodeId, dst: NodeId) -> None:
        channel = self.channels[(src, dst)]
        envelope = channel.pop()
        if not channel:
            self._nonempty.discard((src, dst))
        if envelope.epoch != self.epoch:
            self.stale += 1
            self.trace.append(self.clock, TraceKind.DROP, src, dst, str(envelope.protocol),
                              f"stale epoch {envelope.epoch}")
            return
        self.trace.append(self.clock, TraceKind.DELIVER, src, dst, str(envelope.protocol),
                          f"{len(envelope.body)}B")
        outbox = self.nodes[dst].on_envelope(envelope)
        self.submit(dst, outbox)

    def _tick(self, node_id: NodeId) -> None:
        gossip_dst = self._gossip_cursor[node_id]
        self._gossip_cursor[node_id] = (gossip_dst + 1) % self.n
        self.trace.append(self.clock, TraceKind.LOOP, node_id, node_id, None, f"gossip->{gossip_dst}")
        outbox = self.nodes[node_id].tick()
        self.submit(node_id, outbox, gossip_dst)

    # ------------------------------------------------------------------
    # Sending
    # ------------------------------------------------------------------

    def submit(self, src: NodeId, outbox: Outbox, gossip_dst: Optional[NodeId] = None) -> None:
        """Pack a node's outputs into envelopes and enqueue them"""
        if not outbox:
            return
        frames: Dict[Tuple[NodeId, Protocol], list] = {}
        if outbox.fresh:
            for dst in range(self.n):
                for protocol, item in outbox.fresh:
                    frames.setdefault((dst, protocol), []).append(item)
        if outbox.gossip and gossip_dst is not None:
            for protocol, item in outbox.gossip:
                frames.setdefault((gossip_dst, protocol), []).append(item)
        for dst, protocol, item in outbox.targeted:
            if 0 <= dst < self.n:
                frames.setdefault((dst, protocol), []).append(item)

        bodies: Dict[tuple, bytes] = {}
        for dst, protocol in sorted(frames, key=lambda key: (key[0], _PROTOCOL_ORDER[key[1]])):
            items = tuple(dict.fromkeys(frames[(dst, protocol)]))
            cache_key = (protocol, items)
            body = bodies.get(cache_key)
            if body is None:
                body = get_schema(protocol).encode(items)
                bodies[cache_key] = body
            self.enqueue(Envelope(src, dst, protocol, self.epoch, body))

        for dst, protocol, body in outbox.raw:
            if 0 <= dst < self.n:
                self.enqueue(Envelope(src, dst, Protocol(protocol), self.epoch, body))

    def enqueue(self, envelope: Envelope) -> bool:
        key = (envelope.src, envelope.dst)
        if self.channels[key].offer(envelope):
            self._nonempty.add(key)
            return True
        self.drops += 1
        self.trace.append(self.clock, TraceKind.DROP, envelope.src, envelope.dst, str(envelope.protocol),
                          "channel full")
        logger.debug(f"Dropped envelope {envelope.src}->{envelope.dst} ({envelope.protocol}): channel full")
        return False

    # ------------------------------------------------------------------
    # Epoch management (driven by the recycler)
    # ------------------------------------------------------------------

    def purge_channels(self) -> int:
        purged = sum(channel.purge() for channel in self.channels.values())
        self._nonempty.clear()
        return purged

    def advance_epoch(self) -> int:
        self.epoch += 1
        self.epoch_started_at = self.clock
        self.scheduler.reset()
        self._gossip_cursor = [0] * self.n
        self.drops = 0
        self.stale = 0
        for node in self.nodes:
            node.probe.anomalies = 0
        return self.epoch


def step(world: SimWorld) -> SimWorld:
    """Execute exactly one atomic step"""
    return world.step()


def run_until(world: SimWorld, predicate: Callable[[SimWorld], bool], max_steps: int) -> RunResult:
    """Step under the world's fair schedule until predicate holds or max_steps is exhausted"""
    if max_steps <= 0:
        raise ValueError(f"max_steps must be positive, got {max_steps}")
    steps = 0
    while True:
        if predicate(world):
            return RunResult(world, True, steps)
        if steps >= max_steps:
            return RunResult(world, False, steps)
        world.step()
        if world.quiescent:
            return RunResult(world, predicate(world), steps)
        steps += 1
