"""
Tests for the multivalued consensus node.
"""

import pytest

from app.core.exceptions import InjectionError, ProtocolError
from app.core.models import ERROR, PENDING, Outcome, Protocol, SystemParams
from app.modules.bc.coin import ConstantCoin
from app.modules.mvc.node import MvcNode
from app.modules.simnet.models import Envelope
from app.modules.simnet.world import SimWorld, run_until

VALUES = ["a", "b", "c", "d"]


def _load_deliveries(node: MvcNode, inits: dict, valids: dict) -> None:
    for sender, value in inits.items():
        node.inject(f"brb.init.{sender}.delivered", [sender, value])
    for sender, flag in valids.items():
        node.inject(f"brb.valid.{sender}.delivered", [sender, flag])


@pytest.fixture
def node(params4):
    return MvcNode(0, params4, VALUES, seed=7)


class TestMvcPropose:
    """propose() at the API boundary"""

    def test_value_outside_set(self, node):
        """Proposals must lie in V"""
        with pytest.raises(ProtocolError):
            node.propose("zz")

    def test_propose_starts_vbb(self, node):
        """Proposing broadcasts (id, value) in the INIT phase"""
        out = node.propose("b")
        assert node.proposal == "b"
        assert ("INIT", "init", 0, (0, "b")) in out.items_for(Protocol.BRB)
        assert node.probe.events[0].kind == "mvc.propose"

    def test_conflicting_proposal_ignored(self, node):
        """A second, different proposal is an anomaly"""
        node.propose("a")
        assert not node.propose("b")
        assert node.proposal == "a"
        assert node.probe.anomalies == 1

    def test_fresh_node_pending(self, node):
        """Nothing decided before the binary object starts"""
        assert node.result() is PENDING
        assert not node.mc_echo()


class TestMvcQueries:
    """sameValue, mcEcho and the result rules"""

    def test_same_value_unanimous(self, node):
        """n−2t deliveries of one value and nothing else"""
        _load_deliveries(node, {0: "a", 1: "a", 2: "a"}, {0: True, 1: True, 2: True})
        assert node.mc_echo()
        assert node.same_value()

    def test_same_value_split(self, node):
        """Two decided values make sameValue false"""
        _load_deliveries(node, {0: "a", 1: "a", 2: "b", 3: "b"}, {k: True for k in range(4)})
        assert not node.same_value()

    def test_binary_false_is_error(self, node):
        """A binary decision of false means no value"""
        node.inject("bc.decision", {"tag": "decided", "value": False})
        assert node.result() is ERROR

    def test_binary_true_without_support_and_no_true_in_bv(self, node):
        """A true decision nothing supports is ⊠"""
        node.inject("bc.decision", {"tag": "decided", "value": True})
        assert node.result() is ERROR

    def test_binary_true_waits_for_support(self, node):
        """With true in bin_values and no mcEcho the node keeps waiting"""
        node.inject("bc.decision", {"tag": "decided", "value": True})
        node.inject("bv.bin_values", [True])
        assert node.result() is PENDING

    def test_binary_true_with_support_decides(self, node):
        """The majority delivered value is the result"""
        node.inject("bc.decision", {"tag": "decided", "value": True})
        _load_deliveries(node, {0: "c", 1: "c", 2: "c"}, {0: True, 1: True, 2: True})
        assert node.result() == Outcome.decided("c")

    def test_tick_latches_same_value(self, node):
        """With mcEcho the tick latches sameValue and proposes it"""
        _load_deliveries(node, {0: "a", 1: "a", 2: "a"}, {0: True, 1: True, 2: True})
        node.tick()
        assert node.same_value_latch is True
        assert node.bc.proposal is True
        assert node.bv.my_value is True


class TestMvcWire:
    """Envelope handling and injection paths"""

    def test_malformed_frame_counted(self, node):
        """Undecodable bodies are dropped and counted"""
        out = node.on_envelope(Envelope(1, 0, Protocol.BC, 0, b"{nonsense"))
        assert not out
        assert node.probe.anomalies == 1

    def test_bv_frame_reaches_bv_object(self, node):
        """BV frames feed the node's BV object"""
        node.on_envelope(Envelope(2, 0, Protocol.BV, 0, b"[[true]]"))
        assert node.bv.received[True] == {2}

    def test_unknown_injection_path(self, node):
        """Paths outside the state containers raise"""
        for path in ("mvc", "xyz.field", "mvc.nothing"):
            with pytest.raises(InjectionError):
                node.inject(path, None)

    def test_reset_restores_initial_state(self, node):
        """reset() forgets everything about the epoch"""
        fresh = node.state_dump()
        node.propose("a")
        node.inject("bc.decision", {"tag": "decided", "value": True})
        node.reset(0)
        assert node.state_dump() == fresh


class TestMvcEndToEnd:
    """Whole systems of correct nodes on the simulated network"""

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_unanimous_n4(self, seed):
        """Every correct node decides the common proposal"""
        params = SystemParams(n=4, t=1)
        nodes = [MvcNode(k, params, VALUES, seed=seed) for k in range(4)]
        world = SimWorld(params, nodes, seed=seed)
        for k in range(4):
            world.submit(k, nodes[k].propose("b"))
        result = run_until(world, lambda w: all(not n.result().is_pending for n in nodes), 50_000)
        assert result.satisfied
        assert all(n.result() == Outcome.decided("b") for n in nodes)

    def test_distinct_proposals_agree(self):
        """All-different proposals end in one common outcome"""
        params = SystemParams(n=4, t=1)
        nodes = [MvcNode(k, params, VALUES, seed=3, coin=ConstantCoin(False)) for k in range(4)]
        world = SimWorld(params, nodes, seed=3)
        for k in range(4):
            world.submit(k, nodes[k].propose(VALUES[k]))
        result = run_until(world, lambda w: all(not n.result().is_pending for n in nodes), 50_000)
        assert result.satisfied
        assert len({n.result() for n in nodes}) == 1


if __name__ == "__main__":
    pytest.main([__file__])
