"""
Tests for the recycling oracle.
"""

import pytest

from app.core.exceptions import RecycleError
from app.core.models import Outcome, SystemParams
from app.modules.mvc.node import MvcNode
from app.modules.recycler.service import completed, off_initial_state, pending_nodes, recycle
from app.modules.simnet.world import SimWorld, run_until

VALUES = ["a", "b"]


@pytest.fixture
def decided_world():
    params = SystemParams(n=4, t=1)
    nodes = [MvcNode(k, params, VALUES, seed=2) for k in range(4)]
    world = SimWorld(params, nodes, seed=2)
    for node in nodes:
        world.submit(node.node_id, node.propose("a"))
    result = run_until(world, completed, 50_000)
    assert result.satisfied
    return world


class TestRecycle:
    """Epoch boundaries"""

    def test_refused_while_pending(self):
        """A world with pending nodes cannot recycle"""
        params = SystemParams(n=4, t=1)
        world = SimWorld(params, [MvcNode(k, params, VALUES) for k in range(4)])
        assert pending_nodes(world) == [0, 1, 2, 3]
        with pytest.raises(RecycleError):
            recycle(world)
        assert world.epoch == 0

    def test_recycle_resets_everything(self, decided_world):
        """After recycling every node is back in its initial state"""
        world = decided_world
        assert all(world.nodes[k].result() == Outcome.decided("a") for k in range(4))
        recycle(world)
        assert world.epoch == 1
        assert all(action.kind == "tick" for action in world.enabled_actions())
        assert off_initial_state(world) == []
        assert all(world.nodes[k].result().is_pending for k in range(4))
        assert all(world.nodes[k].epoch == 1 for k in range(4))

    def test_detects_leftover_state(self, decided_world):
        """A node that keeps state across the boundary is reported"""
        world = decided_world
        recycle(world)
        world.nodes[2].inject("mvc.same_value", True)
        assert off_initial_state(world) == [2]

    def test_next_epoch_decides_again(self, decided_world):
        """A recycled world reaches a fresh decision"""
        world = decided_world
        recycle(world)
        for k in range(4):
            world.submit(k, world.nodes[k].propose("b"))
        assert run_until(world, completed, 50_000).satisfied
        assert all(world.nodes[k].result() == Outcome.decided("b") for k in range(4))


if __name__ == "__main__":
    pytest.main([__file__])
