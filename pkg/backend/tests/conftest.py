"""
Shared fixtures and helpers for the harness tests.
"""

from collections import deque
from typing import Any, Dict, List, Sequence

import pytest

from app.core.models import Protocol, SystemParams
from app.modules.simnet.models import Envelope, Outbox
from app.modules.simnet.node import NodeHandle


class RecordingNode(NodeHandle):
    """Passive node: keeps every envelope it receives and never ticks"""

    ticks = False

    def __init__(self, node_id: int):
        self.node_id = node_id
        super().__init__()
        self.received: List[Envelope] = []
        self.epoch = 0

    def on_envelope(self, envelope: Envelope) -> Outbox:
        self.received.append(envelope)
        return Outbox()

    def tick(self) -> Outbox:
        return Outbox()

    def reset(self, epoch: int) -> None:
        self.epoch = epoch
        self.received = []


def route_bc(objects: Sequence[Any], outboxes: Dict[int, Outbox], max_messages: int = 100_000) -> None:
    """
    Deliver fresh BC items between binary consensus objects in FIFO order
    until nobody has anything new to say.
    """
    queue = deque()
    for src, out in outboxes.items():
        for protocol, item in out.fresh:
            if protocol == Protocol.BC:
                queue.extend((src, dst, item) for dst in range(len(objects)))
    delivered = 0
    while queue and delivered < max_messages:
        src, dst, (kind, round_no, value) = queue.popleft()
        delivered += 1
        reply = objects[dst].on_bc_message(src, kind, round_no, value)
        for protocol, item in reply.fresh:
            if protocol == Protocol.BC:
                queue.extend((dst, other, item) for other in range(len(objects)))


@pytest.fixture
def params4() -> SystemParams:
    return SystemParams(n=4, t=1)


@pytest.fixture
def params7() -> SystemParams:
    return SystemParams(n=7, t=2)


@pytest.fixture
def recording_nodes():
    return [RecordingNode(k) for k in range(4)]
