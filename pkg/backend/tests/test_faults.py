"""
Tests for Byzantine strategies and transient-fault injection.
"""

import random

import pytest
from pydantic import TypeAdapter, ValidationError

from app.core.exceptions import InjectionError, ParameterError
from app.core.models import Protocol, SystemParams
from app.modules.brb.models import Phase
from app.modules.faults.byzantine import ByzantineNode, byzantine_react
from app.modules.faults.injection import (
    ChannelMutation,
    FieldMutation,
    InjectionPlan,
    RandomizeMutation,
    apply_injection,
    randomize_node,
)
from app.modules.faults.strategies import (
    ByzantineStrategy,
    CollusionValueStrategy,
    EquivocateStrategy,
    FakeValidFalseStrategy,
    RandomNoiseStrategy,
    SilentStrategy,
)
from app.modules.mvc.node import MvcNode
from app.modules.simnet.models import Outbox
from app.modules.simnet.world import SimWorld

VALUES = ["a", "b", "z"]


def _world(params: SystemParams, byzantine: dict = None) -> SimWorld:
    nodes = []
    for k in range(params.n):
        core = MvcNode(k, params, VALUES)
        strategy = (byzantine or {}).get(k)
        nodes.append(core if strategy is None else ByzantineNode(core, strategy, params.n))
    return SimWorld(params, nodes)


class TestStrategies:
    """Strategy models as written in scenario files"""

    def test_discriminated_parse(self):
        """kind picks the model"""
        adapter = TypeAdapter(ByzantineStrategy)
        strategy = adapter.validate_python({"kind": "equivocate", "v1": "a", "v2": "b"})
        assert isinstance(strategy, EquivocateStrategy)
        assert strategy.default_proposal(VALUES) == "a"

    def test_unknown_kind_rejected(self):
        """Unknown strategies and extra keys are errors"""
        adapter = TypeAdapter(ByzantineStrategy)
        with pytest.raises(ValidationError):
            adapter.validate_python({"kind": "teleport"})
        with pytest.raises(ValidationError):
            adapter.validate_python({"kind": "silent", "loud": True})

    def test_core_running(self):
        """Silent and noise never run the honest core"""
        assert not SilentStrategy().runs_core
        assert not RandomNoiseStrategy().runs_core
        assert CollusionValueStrategy(v_byz="z").runs_core
        assert SilentStrategy().default_proposal(VALUES) is None


class TestByzantineReact:
    """Rewriting an honest outbox"""

    def _init_outbox(self, node_id: int, value: str) -> Outbox:
        return Outbox().broadcast(Protocol.BRB, ("INIT", "init", node_id, (node_id, value)))

    def test_silent_sends_nothing(self):
        """Silence is total"""
        out = byzantine_react(SilentStrategy(), 3, 4, self._init_outbox(3, "a"), random.Random(0))
        assert not out

    def test_equivocate_splits_init(self):
        """Low ids see v1, high ids see v2"""
        strategy = EquivocateStrategy(v1="a", v2="b")
        out = byzantine_react(strategy, 3, 4, self._init_outbox(3, "a"), random.Random(0))
        assert out.fresh == []
        sent = {dst: item[3][1] for dst, _, item in out.targeted}
        assert sent == {0: "a", 1: "a", 2: "b", 3: "b"}

    def test_equivocate_keeps_other_traffic(self):
        """Only the node's own INIT is split"""
        strategy = EquivocateStrategy(v1="a", v2="b")
        echo = ("ECHO", "init", 0, (0, "a"))
        out = byzantine_react(strategy, 3, 4, Outbox().broadcast(Protocol.BRB, echo), random.Random(0))
        assert out.fresh == [(Protocol.BRB, echo)]

    def test_fake_valid_forces_flag(self):
        """Own VALID payloads carry the forced boolean"""
        honest = Outbox().broadcast(Protocol.BRB, ("INIT", "valid", 3, (3, True)))
        out = byzantine_react(FakeValidFalseStrategy(), 3, 4, honest, random.Random(0))
        assert out.fresh == [(Protocol.BRB, ("INIT", "valid", 3, (3, False)))]

    def test_collusion_is_honest(self):
        """Collusion only differs in what it proposes"""
        honest = self._init_outbox(3, "z")
        assert byzantine_react(CollusionValueStrategy(v_byz="z"), 3, 4, honest, random.Random(0)) is honest

    def test_noise_is_one_raw_frame(self):
        """Random noise emits exactly one raw frame per reaction"""
        out = byzantine_react(RandomNoiseStrategy(seed=1), 3, 4, Outbox(), random.Random(1))
        assert len(out.raw) == 1
        dst, protocol, body = out.raw[0]
        assert 0 <= dst < 4 and isinstance(body, bytes)


class TestByzantineNode:
    """Wrapped cores inside a world"""

    def test_silent_node_does_not_tick(self, params4):
        """The world never schedules a silent node"""
        world = _world(params4, {3: SilentStrategy()})
        assert 3 not in world._tickers
        assert world.byzantine_ids == [3]

    def test_too_many_byzantine_nodes(self, params4):
        """At most t Byzantine handles"""
        with pytest.raises(ParameterError):
            _world(params4, {2: SilentStrategy(), 3: SilentStrategy()})

    def test_noise_does_not_break_correct_nodes(self, params4):
        """Garbage frames are counted as anomalies, never raised"""
        world = _world(params4, {3: RandomNoiseStrategy(seed=4)})
        for k in range(3):
            world.submit(k, world.nodes[k].propose("a"))
        for _ in range(3000):
            world.step()
        assert world.clock == 3000


class TestInjection:
    """Injection plans applied at the start of an epoch"""

    def test_field_mutation_applies(self, params4):
        """The addressed field is overwritten"""
        world = _world(params4)
        plan = InjectionPlan(targets=[1], mutations=[FieldMutation(path="brb.valid.2.delivered", value=[2, True])])
        apply_injection(world, plan)
        assert world.nodes[1].vbb.brb[Phase.VALID][2].delivered == (2, True)

    def test_only_at_epoch_start(self, params4):
        """Once the epoch ran a step, injection is refused"""
        world = _world(params4)
        world.step()
        with pytest.raises(InjectionError):
            apply_injection(world, InjectionPlan(targets=[0]))

    def test_byzantine_target_rejected(self, params4):
        """Byzantine nodes are not injection targets"""
        world = _world(params4, {3: SilentStrategy()})
        with pytest.raises(InjectionError):
            apply_injection(world, InjectionPlan(targets=[3]))

    def test_bad_path_rejected(self, params4):
        """Paths that do not address a state field raise"""
        world = _world(params4)
        plan = InjectionPlan(targets=[0], mutations=[FieldMutation(path="bv.nonsense", value=1)])
        with pytest.raises(InjectionError):
            apply_injection(world, plan)

    def test_rejected_plan_leaves_world_untouched(self, params4):
        """A bad mutation late in the plan means no target is changed"""
        world = _world(params4)
        before = [node.state_dump() for node in world.nodes]
        plan = InjectionPlan(targets=[0, 1], mutations=[
            FieldMutation(path="brb.valid.2.delivered", value=[2, True]),
            RandomizeMutation(randomize=3),
            FieldMutation(path="bv.nonsense", value=1),
        ])
        with pytest.raises(InjectionError):
            apply_injection(world, plan)
        assert [node.state_dump() for node in world.nodes] == before
        assert world.anomalies == 0

    def test_accepted_plan_matches_dry_run(self, params4):
        """Randomized targets end up exactly as a detached replica would"""
        world = _world(params4)
        apply_injection(world, InjectionPlan(targets=[2], mutations=[RandomizeMutation(randomize=8)]))
        replica = MvcNode(2, params4, VALUES)
        randomize_node(replica, random.Random("8:2"))
        assert world.nodes[2].state_dump() == replica.state_dump()

    def test_channel_preload(self, params4):
        """Pre-loaded envelopes sit in the named channel"""
        world = _world(params4)
        plan = InjectionPlan(channel_mutations=[
            ChannelMutation(src=2, dst=0, protocol=Protocol.BV, items=[[True]]),
            ChannelMutation(src=2, dst=0, protocol=Protocol.BRB, raw="not json"),
        ])
        apply_injection(world, plan)
        assert world.in_flight(2, 0) == 2

    def test_channel_overfill_rejected(self, params4):
        """More envelopes than the capacity is a malformed plan"""
        world = SimWorld(params4, [MvcNode(k, params4, VALUES) for k in range(4)], channel_capacity=1)
        plan = InjectionPlan(channel_mutations=[
            ChannelMutation(src=0, dst=1, protocol=Protocol.BV, items=[[True]]),
            ChannelMutation(src=0, dst=1, protocol=Protocol.BV, items=[[False]]),
        ])
        with pytest.raises(InjectionError):
            apply_injection(world, plan)

    def test_channel_mutation_needs_one_body(self):
        """items and raw are exclusive"""
        with pytest.raises(ValidationError):
            ChannelMutation(src=0, dst=1, protocol=Protocol.BV)

    def test_randomize_is_seeded(self, params4):
        """The same seed corrupts two replicas identically"""
        first = MvcNode(0, params4, VALUES)
        second = MvcNode(0, params4, VALUES)
        count = randomize_node(first, random.Random("11:0"))
        assert count == randomize_node(second, random.Random("11:0"))
        assert first.state_dump() == second.state_dump()

    def test_randomize_plan_parses(self):
        """{"randomize": k} is recognised in a plan"""
        plan = InjectionPlan.model_validate({"targets": [0], "mutations": [{"randomize": 5}]})
        assert isinstance(plan.mutations[0], RandomizeMutation)


if __name__ == "__main__":
    pytest.main([__file__])
