"""
Seeded fair scheduler.

Picks the next atomic step among enabled actions: weighted-random between node
ticks and channel deliveries, optionally delegated to an adversarial policy,
with a starvation bound that forces any action kept waiting too long.
"""

import random
from typing import Callable, Dict, List, Optional, Sequence, Tuple, TYPE_CHECKING
import logging

from app.core.models import NodeId
from app.modules.simnet.models import Action

if TYPE_CHECKING:
    from app.modules.simnet.world import SimWorld

logger = logging.getLogger(__name__)

Policy = Callable[["SimWorld", List[Action]], Action]


class Scheduler:
    def __init__(
        self,
        rng: random.Random,
        tick_weight: float,
        starvation_bound: int,
        policy: Optional[Policy] = None,
    ):
        if starvation_bound < 1:
            raise ValueError(f"Starvation bound must be positive, got {starvation_bound}")
        self.rng = rng
        self.tick_weight = tick_weight
        self.starvation_bound = starvation_bound
        self.policy = policy
        self.forced = 0
        self._waiting_since: Dict[Action, int] = {}

    def reset(self) -> None:
        self._waiting_since.clear()

    def choose(
        self,
        world: "SimWorld",
        clock: int,
        nonempty: Sequence[Tuple[NodeId, NodeId]],
        tickers: Sequence[NodeId],
    ) -> Optional[Action]:
        """Return the next action, or None when nothing is enabled"""
        enabled = [Action.deliver(src, dst) for src, dst in nonempty]
        enabled.extend(Action.tick(node) for node in tickers)
        if not enabled:
            self._waiting_since.clear()
            return None

        waiting = self._waiting_since
        enabled_set = set(enabled)
        for action in [a for a in waiting if a not in enabled_set]:
            del waiting[action]

        starving: Optional[Action] = None
        for action in enabled:
            since = waiting.setdefault(action, clock)
            if clock - since >= self.starvation_bound:
                if starving is None or since < waiting[starving]:
                    starving = action

        if starving is not None:
            choice = starving
            self.forced += 1
        elif self.policy is not None:
            choice = self.policy(world, enabled)
            if choice not in enabled_set:
                raise ValueError(f"Policy chose a disabled action: {choice}")
        elif tickers and (not nonempty or self.rng.random() < self.tick_weight):
            choice = Action.tick(tickers[self.rng.randrange(len(tickers))])
        else:
            src, dst = nonempty[self.rng.randrange(len(nonempty))]
            choice = Action.deliver(src, dst)

        waiting[choice] = clock + 1
        return choice
