"""
Binary-values broadcast object.

A value is relayed once t+1 nodes sent it and accepted into bin_values once
2t+1 did. The object is inactive (the post-recycling state) until the first
local broadcast or the first received vote.
"""

from typing import Any, Callable, Dict, FrozenSet, Optional, Set, Tuple
import logging

from app.core.exceptions import InjectionError
from app.core.models import NodeId, Protocol, SystemParams, thresholds
from app.modules.simnet.models import Outbox, Probe

logger = logging.getLogger(__name__)

Wrap = Callable[[bool], Tuple[Protocol, Any]]


def mvc_item(value: bool) -> Tuple[Protocol, Any]:
    return Protocol.BV, (value,)


class BvObject:
    __slots__ = (
        "node_id", "n", "t", "probe", "wrap", "label",
        "active", "my_value", "received", "relayed", "_bin_values", "first_accepted",
    )

    def __init__(
        self,
        node_id: NodeId,
        params: SystemParams,
        probe: Optional[Probe] = None,
        wrap: Wrap = mvc_item,
        label: str = "bv",
    ):
        thresholds(params)
        self.node_id = node_id
        self.n = params.n
        self.t = params.t
        self.probe = probe or Probe(node_id)
        self.wrap = wrap
        self.label = label

        self.active = False
        self.my_value: Optional[bool] = None
        self.received: Dict[bool, Set[NodeId]] = {False: set(), True: set()}
        self.relayed: Set[bool] = set()
        self._bin_values: Set[bool] = set()
        self.first_accepted: Optional[bool] = None

    def _emit(self, out: Outbox, value: bool, fresh: bool) -> None:
        protocol, item = self.wrap(value)
        if fresh:
            out.broadcast(protocol, item)
        else:
            out.restate(protocol, item)

    def bv_broadcast(self, value: bool) -> Outbox:
        out = Outbox()
        self.active = True
        if self.my_value is None:
            self.my_value = value
            self.probe.record("bv.broadcast", (self.label,), value)
            self._emit(out, value, fresh=True)
        elif self.my_value == value:
            self._emit(out, value, fresh=False)
        else:
            logger.debug(f"Node {self.node_id}: {self.label} keeps {self.my_value}, ignoring {value}")
            self.probe.anomaly(f"{self.label} re-broadcast with a different value")
        return out

    def on_bv_message(self, src: NodeId, value: bool) -> Outbox:
        out = Outbox()
        if not 0 <= src < self.n:
            return out
        self.active = True
        voters = self.received[value]
        if src in voters:
            return out
        voters.add(src)

        if len(voters) >= self.t + 1 and value not in self.relayed:
            self.relayed.add(value)
            if value != self.my_value:
                self._emit(out, value, fresh=True)
        if len(voters) >= 2 * self.t + 1 and value not in self._bin_values:
            self._bin_values.add(value)
            if self.first_accepted is None:
                self.first_accepted = value
            self.probe.record("bv.accept", (self.label,), value)
        return out

    def bin_values(self) -> FrozenSet[bool]:
        return frozenset(self._bin_values)

    def resend(self) -> Outbox:
        out = Outbox()
        if self.my_value is not None:
            self._emit(out, self.my_value, fresh=False)
        for value in (False, True):
            if value in self.relayed and value != self.my_value:
                self._emit(out, value, fresh=False)
        return out

    def inject(self, field: str, value: Any) -> None:
        def as_bools(raw: Any) -> Set[bool]:
            if not isinstance(raw, (list, tuple)) or not all(isinstance(v, bool) for v in raw):
                raise InjectionError(f"{self.label}.{field} expects a list of booleans, got {raw!r}")
            return set(raw)

        if field == "active":
            if not isinstance(value, bool):
                raise InjectionError(f"{self.label}.active must be a boolean")
            self.active = value
        elif field in ("my_value", "first_accepted"):
            if value is not None and not isinstance(value, bool):
                raise InjectionError(f"{self.label}.{field} must be a boolean or null")
            setattr(self, field, value)
        elif field == "relayed":
            self.relayed = as_bools(value)
        elif field == "bin_values":
            self._bin_values = as_bools(value)
        elif field in ("received.true", "received.false"):
            if not isinstance(value, (list, tuple)) or not all(
                isinstance(v, int) and not isinstance(v, bool) and 0 <= v < self.n for v in value
            ):
                raise InjectionError(f"{self.label}.{field} expects node ids in [0, {self.n})")
            self.received[field == "received.true"] = set(value)
        else:
            raise InjectionError(f"Unknown BV field: {field}")

    def state_dump(self) -> dict:
        return {
            "active": self.active,
            "my_value": self.my_value,
            "received": {str(v).lower(): sorted(self.received[v]) for v in (False, True)},
            "relayed": sorted(self.relayed),
            "bin_values": sorted(self._bin_values),
            "first_accepted": self.first_accepted,
        }
