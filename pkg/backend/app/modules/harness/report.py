"""
Harness report models.

Reports are plain pydantic models dumped as indented JSON. Nothing in them
depends on wall-clock time or iteration order of hashed containers, so the
same scenario and seed always serialize to the same bytes.
"""

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class VerdictStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    SKIPPED = "skipped"

    def __str__(self):
        return self.value


class Witness(BaseModel):
    """Smallest evidence of a failure: where, who and what"""

    step: Optional[int] = None
    nodes: List[int] = Field(default_factory=list)
    values: List[Any] = Field(default_factory=list)
    note: str = ""


class Verdict(BaseModel):
    status: VerdictStatus
    witness: Optional[Witness] = None

    @classmethod
    def passed(cls) -> "Verdict":
        return cls(status=VerdictStatus.PASS)

    @classmethod
    def skipped(cls) -> "Verdict":
        return cls(status=VerdictStatus.SKIPPED)

    @classmethod
    def failed(cls, step: Optional[int], nodes: List[int], values: List[Any], note: str = "") -> "Verdict":
        return cls(status=VerdictStatus.FAIL, witness=Witness(step=step, nodes=nodes, values=values, note=note))

    @property
    def is_failure(self) -> bool:
        return self.status is VerdictStatus.FAIL


class EpochReport(BaseModel):
    epoch: int
    injected: bool
    completed: bool
    steps: int
    outcomes: Dict[str, Any]
    verdicts: Dict[str, Verdict]
    drops: int = 0
    stale: int = 0
    anomalies: int = 0
    forced: int = 0
    reset_mismatch: List[int] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.reset_mismatch and not any(v.is_failure for v in self.verdicts.values())

    def failures(self) -> List[str]:
        return [key for key, verdict in self.verdicts.items() if verdict.is_failure]


class Report(BaseModel):
    stack: str
    seed: int
    n: int
    t: int
    epochs: List[EpochReport] = Field(default_factory=list)
    passed: bool = False

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)


class DiffReport(BaseModel):
    """SSBFT stack against the reference stack on one fault-free scenario"""

    seed: int
    legal: List[Any]
    ssbft: Dict[str, Any]
    reference: Dict[str, Any]
    ssbft_agreement: bool
    reference_agreement: bool
    passed: bool

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)


class SweepSummary(BaseModel):
    seeds: List[int]
    failed_seeds: List[int]
    failures: Dict[str, int]
    passed: bool

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)
