"""
Byzantine strategies.

Each strategy is a pydantic model discriminated by its ``kind`` so it can be
written inline in a scenario file, e.g. {"kind": "equivocate", "v1": "a", "v2": "b"}.
"""

from typing import Annotated, Literal, Optional, Sequence, Union

from pydantic import BaseModel, ConfigDict, Field

from app.core.models import Value


class _Strategy(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    def default_proposal(self, values: Sequence[Value]) -> Optional[Value]:
        """Value the wrapped core proposes when the scenario names none"""
        return values[0]

    @property
    def runs_core(self) -> bool:
        return True


class SilentStrategy(_Strategy):
    kind: Literal["silent"] = "silent"

    def default_proposal(self, values: Sequence[Value]) -> Optional[Value]:
        return None

    @property
    def runs_core(self) -> bool:
        return False


class EquivocateStrategy(_Strategy):
    kind: Literal["equivocate"] = "equivocate"
    v1: Value
    v2: Value

    def default_proposal(self, values: Sequence[Value]) -> Optional[Value]:
        return self.v1


class FakeValidTrueStrategy(_Strategy):
    kind: Literal["fake_valid_true"] = "fake_valid_true"


class FakeValidFalseStrategy(_Strategy):
    kind: Literal["fake_valid_false"] = "fake_valid_false"


class CollusionValueStrategy(_Strategy):
    kind: Literal["collusion_value"] = "collusion_value"
    v_byz: Value

    def default_proposal(self, values: Sequence[Value]) -> Optional[Value]:
        return self.v_byz


class RandomNoiseStrategy(_Strategy):
    kind: Literal["random_noise"] = "random_noise"
    seed: int = 0

    def default_proposal(self, values: Sequence[Value]) -> Optional[Value]:
        return None

    @property
    def runs_core(self) -> bool:
        return False


ByzantineStrategy = Annotated[
    Union[
        SilentStrategy,
        EquivocateStrategy,
        FakeValidTrueStrategy,
        FakeValidFalseStrategy,
        CollusionValueStrategy,
        RandomNoiseStrategy,
    ],
    Field(discriminator="kind"),
]

__all__ = [
    "ByzantineStrategy",
    "SilentStrategy",
    "EquivocateStrategy",
    "FakeValidTrueStrategy",
    "FakeValidFalseStrategy",
    "CollusionValueStrategy",
    "RandomNoiseStrategy",
]
