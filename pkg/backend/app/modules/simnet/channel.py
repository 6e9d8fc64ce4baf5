"""
Bounded directed channel.
"""

from collections import deque
from typing import Deque, Iterator
import logging

from app.core.models import NodeId
from app.modules.simnet.models import Envelope

logger = logging.getLogger(__name__)


class Channel:
    """FIFO buffer from src to dst that never holds more than capacity envelopes"""

    __slots__ = ("src", "dst", "capacity", "buffer")

    def __init__(self, src: NodeId, dst: NodeId, capacity: int):
        if capacity < 1:
            raise ValueError(f"Channel capacity must be positive, got {capacity}")
        self.src = src
        self.dst = dst
        self.capacity = capacity
        self.buffer: Deque[Envelope] = deque()

    def offer(self, envelope: Envelope) -> bool:
        """Enqueue envelope; a full channel drops it (newest-drop) and returns False"""
        if len(self.buffer) >= self.capacity:
            return False
        self.buffer.append(envelope)
        return True

    def pop(self) -> Envelope:
        return self.buffer.popleft()

    def purge(self) -> int:
        dropped = len(self.buffer)
        self.buffer.clear()
        return dropped

    def __len__(self) -> int:
        return len(self.buffer)

    def __iter__(self) -> Iterator[Envelope]:
        return iter(self.buffer)

    def __repr__(self) -> str:
        return f"Channel({self.src}->{self.dst}, {len(self.buffer)}/{self.capacity})"
