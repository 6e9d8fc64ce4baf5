"""
Recycling oracle.

Observes the whole world between steps: once every correct node holds a
non-Pending result it advances the epoch, purges every channel and returns
every node's per-epoch objects to the post-recycling state.
"""

from typing import Dict, List
import copy
import logging

from pydantic_core import to_json

from app.core.exceptions import RecycleError
from app.core.models import NodeId
from app.core.trace import TraceKind
from app.modules.simnet.models import Probe
from app.modules.simnet.node import NodeHandle
from app.modules.simnet.world import SimWorld

logger = logging.getLogger(__name__)


def pending_nodes(world: SimWorld) -> List[NodeId]:
    return [k for k in world.correct_ids if world.nodes[k].result().is_pending]


def completed(world: SimWorld) -> bool:
    """True iff every correct node's result() is non-Pending"""
    return all(not world.nodes[k].result().is_pending for k in world.correct_ids)


def recycle(world: SimWorld) -> SimWorld:
    """Reset every per-epoch object and move the world to the next epoch"""
    pending = pending_nodes(world)
    if pending:
        logger.warning(f"Recycle rejected at step {world.clock}: nodes {pending} still pending")
        raise RecycleError(f"Nodes {pending} have not completed epoch {world.epoch}")

    purged = world.purge_channels()
    epoch = world.advance_epoch()
    for node in world.nodes:
        node.reset(epoch)
    world.trace.append(world.clock, TraceKind.RECYCLE, summary=f"epoch {epoch}, purged {purged} envelopes")
    logger.info(f"Recycled world into epoch {epoch} at step {world.clock} ({purged} envelopes purged)")
    return world


def initial_dump(node: NodeHandle) -> Dict:
    """State dump of a freshly reset replica of node; node itself is untouched"""
    replica = copy.copy(node)
    replica.probe = Probe(node.node_id)
    replica.reset(getattr(node, "epoch", 0))
    return replica.state_dump()


def off_initial_state(world: SimWorld) -> List[NodeId]:
    """Correct nodes whose serialized state differs from the post-recycling state"""
    mismatched = []
    for k in world.correct_ids:
        node = world.nodes[k]
        if to_json(node.state_dump()) != to_json(initial_dump(node)):
            mismatched.append(k)
    return mismatched
