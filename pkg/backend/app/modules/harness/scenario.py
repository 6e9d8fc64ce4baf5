"""
Scenario files.

A scenario is a JSON object with exactly the keys n, t, values, proposals,
byzantine, injection, seed, step_budget, round_cap, channel_capacity and
epochs. Missing simulation keys fall back to the configured defaults.
"""

from pathlib import Path
from typing import Dict, List, Optional, Union
import logging

import aiofiles
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from app.core.config import settings
from app.core.exceptions import ScenarioError
from app.core.models import NodeId, SystemParams, Value, thresholds
from app.modules.faults.injection import InjectionPlan
from app.modules.faults.strategies import ByzantineStrategy

logger = logging.getLogger(__name__)


class Scenario(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int = Field(..., ge=1)
    t: int = Field(..., ge=0)
    values: List[Value] = Field(..., min_length=1)
    proposals: Dict[NodeId, Value]
    byzantine: Dict[NodeId, ByzantineStrategy] = Field(default_factory=dict)
    injection: Optional[InjectionPlan] = None
    seed: int = 0
    step_budget: int = Field(default_factory=lambda: settings.STEP_BUDGET, ge=1)
    round_cap: int = Field(default_factory=lambda: settings.ROUND_CAP, ge=1)
    channel_capacity: int = Field(default_factory=lambda: settings.CHANNEL_CAPACITY, ge=1)
    epochs: int = Field(1, ge=1)

    @model_validator(mode="after")
    def check_consistency(self):
        thresholds(self.params)
        if len(set(self.values)) != len(self.values):
            raise ValueError("values must be distinct")
        if len(self.byzantine) > self.t:
            raise ValueError(f"{len(self.byzantine)} Byzantine nodes exceed t={self.t}")
        for node in list(self.byzantine) + list(self.proposals):
            if not 0 <= node < self.n:
                raise ValueError(f"node id {node} out of range for n={self.n}")
        missing = [k for k in self.correct_ids if k not in self.proposals]
        if missing:
            raise ValueError(f"correct nodes {missing} have no proposal")
        outside = sorted({v for v in self.proposals.values() if v not in self.values})
        if outside:
            raise ValueError(f"proposals {outside} are not in values")
        if self.injection is not None:
            byzantine_targets = [k for k in self.injection.targets if k in self.byzantine]
            if byzantine_targets:
                raise ValueError(f"injection targets {byzantine_targets} are Byzantine")
        return self

    @property
    def params(self) -> SystemParams:
        return SystemParams(n=self.n, t=self.t)

    @property
    def correct_ids(self) -> List[NodeId]:
        return [k for k in range(self.n) if k not in self.byzantine]

    def proposal_for(self, node: NodeId) -> Optional[Value]:
        if node in self.proposals:
            return self.proposals[node]
        strategy = self.byzantine.get(node)
        return strategy.default_proposal(self.values) if strategy is not None else None

    def with_seed(self, seed: int) -> "Scenario":
        return self.model_copy(update={"seed": seed})


def parse_scenario(text: Union[str, bytes]) -> Scenario:
    try:
        return Scenario.model_validate_json(text)
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first["loc"]) or "scenario"
        logger.warning(f"Rejected scenario: {e.error_count()} error(s), first at {location}: {first['msg']}")
        raise ScenarioError(f"{location}: {first['msg']}") from e


def load_scenario(path: Union[str, Path]) -> Scenario:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioError(f"Cannot read scenario {path}: {e}") from e
    return parse_scenario(text)


async def load_scenario_async(path: Union[str, Path]) -> Scenario:
    try:
        async with aiofiles.open(path, "r", encoding="utf-8") as f:
            text = await f.read()
    except OSError as e:
        raise ScenarioError(f"Cannot read scenario {path}: {e}") from e
    return parse_scenario(text)
