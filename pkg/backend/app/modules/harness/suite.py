"""
Shipped scenario suite run by the ``check`` command.

Covers unanimous runs at n = 4, 7 and 10, the 4/6 split at n = 10, every
Byzantine strategy, the targeted consistency-test injections, a randomized
convergence epoch followed by a clean one, and differential runs against the
reference stack.
"""

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence
import logging

from pydantic import BaseModel

from app.core.models import ERROR, Outcome
from app.modules.brb.models import Phase
from app.modules.faults.injection import FieldMutation, InjectionPlan, RandomizeMutation
from app.modules.faults.strategies import (
    CollusionValueStrategy,
    EquivocateStrategy,
    FakeValidFalseStrategy,
    FakeValidTrueStrategy,
    RandomNoiseStrategy,
    SilentStrategy,
)
from app.modules.harness.runner import ScenarioRunner, diff_scenario
from app.modules.harness.scenario import Scenario
from app.modules.simnet.world import SimWorld

logger = logging.getLogger(__name__)

# Returns a diagnostic when the injected state does not look as intended
InitialCheck = Callable[[SimWorld], Optional[str]]


@dataclass
class SuiteCase:
    name: str
    scenario: Scenario
    differential: bool = False
    initial_check: Optional[InitialCheck] = None
    # Every correct node must end the first epoch with one of these outcomes
    expected: Optional[List[Outcome]] = None


class CaseResult(BaseModel):
    name: str
    passed: bool
    detail: str = ""


def _unanimous(n: int, t: int, value: str = "a", **kwargs) -> Scenario:
    return Scenario(n=n, t=t, values=["a", "b", "c", "d"], proposals={k: value for k in range(n)}, **kwargs)


def _with_byzantine(strategy, n: int = 4, t: int = 1) -> Scenario:
    byzantine = {n - 1: strategy}
    return Scenario(
        n=n, t=t, values=["a", "b", "z"],
        proposals={k: "a" if k % 2 == 0 else "b" for k in range(n - 1)},
        byzantine=byzantine,
    )


def _delivery_is_error(node: int, sender: int) -> InitialCheck:
    def check(world: SimWorld) -> Optional[str]:
        outcome = world.nodes[node].vbb.vbb_deliver(sender)
        return None if outcome.is_error else f"node {node} delivers {outcome} from {sender}"
    return check


def _split_10() -> Scenario:
    return Scenario(
        n=10, t=3, values=["v", "w"],
        proposals={k: "v" if k < 4 else "w" for k in range(10)},
    )


def build_suite() -> List[SuiteCase]:
    cases = [
        SuiteCase("unanimous_n4", _unanimous(4, 1)),
        SuiteCase("unanimous_n7", _unanimous(7, 2)),
        SuiteCase("unanimous_n10", _unanimous(10, 3)),
        SuiteCase("split_n10", _split_10()),
        SuiteCase("byzantine_silent", _with_byzantine(SilentStrategy())),
        SuiteCase("byzantine_equivocate", _with_byzantine(EquivocateStrategy(v1="a", v2="b"))),
        SuiteCase("byzantine_fake_valid_true", _with_byzantine(FakeValidTrueStrategy())),
        SuiteCase("byzantine_fake_valid_false", _with_byzantine(FakeValidFalseStrategy())),
        SuiteCase("byzantine_collusion", _with_byzantine(CollusionValueStrategy(v_byz="z"))),
        SuiteCase("byzantine_random_noise", _with_byzantine(RandomNoiseStrategy(seed=3))),
        SuiteCase(
            "inject_valid_without_init",
            _unanimous(7, 2, injection=InjectionPlan(
                targets=[2],
                mutations=[
                    FieldMutation(path=f"brb.{Phase.INIT.value}.5", value=None),
                    FieldMutation(path=f"brb.{Phase.VALID.value}.5.delivered", value=[5, True]),
                ],
            )),
            initial_check=_delivery_is_error(2, 5),
        ),
        SuiteCase(
            "inject_malformed_payload",
            _unanimous(4, 1, injection=InjectionPlan(
                targets=[1],
                mutations=[
                    FieldMutation(path="brb.init.0.delivered", value="garbage"),
                    FieldMutation(path="brb.valid.0.delivered", value=[0, True]),
                ],
            )),
            initial_check=_delivery_is_error(1, 0),
        ),
        SuiteCase(
            "inject_stalled_valid_phase",
            _unanimous(4, 1, injection=InjectionPlan(
                targets=[0],
                mutations=[
                    FieldMutation(path="brb.init.1.delivered", value=[1, "a"]),
                    FieldMutation(path="brb.init.2.delivered", value=[2, "b"]),
                    FieldMutation(path="brb.init.3.delivered", value=[3, "c"]),
                    FieldMutation(path="brb.valid.1.delivered", value=[1, True]),
                    FieldMutation(path="brb.valid.2.delivered", value=[2, True]),
                    FieldMutation(path="brb.valid.3.delivered", value=[3, True]),
                ],
            )),
            initial_check=_delivery_is_error(0, 1),
        ),
        SuiteCase(
            "inject_binary_pre_decided",
            Scenario(
                n=4, t=1, values=["a", "b", "c", "d"],
                proposals={0: "a", 1: "b", 2: "c", 3: "d"},
                injection=InjectionPlan(
                    targets=[0, 1, 2, 3],
                    mutations=[FieldMutation(path="bc.decision", value={"tag": "decided", "value": True})],
                ),
            ),
            expected=[ERROR],
        ),
        SuiteCase(
            "inject_randomize_then_clean",
            _unanimous(4, 1, epochs=2, injection=InjectionPlan(
                targets=[0, 1, 2, 3], mutations=[RandomizeMutation(randomize=11)],
            )),
        ),
        SuiteCase(
            "inject_randomize_n7_then_clean",
            _unanimous(7, 2, epochs=2, injection=InjectionPlan(
                targets=list(range(7)), mutations=[RandomizeMutation(randomize=0)],
            )),
        ),
        SuiteCase("diff_unanimous_n4", _unanimous(4, 1), differential=True),
        SuiteCase("diff_split_n10", _split_10(), differential=True),
    ]
    return cases


def run_case(case: SuiteCase) -> CaseResult:
    if case.differential:
        diff = diff_scenario(case.scenario)
        detail = "" if diff.passed else f"ssbft={diff.ssbft} reference={diff.reference}"
        return CaseResult(name=case.name, passed=diff.passed, detail=detail)

    problems: List[str] = []

    def after_injection(world: SimWorld) -> None:
        if case.initial_check is not None:
            problem = case.initial_check(world)
            if problem:
                problems.append(problem)

    report = ScenarioRunner(case.scenario, after_injection=after_injection).run()
    if not report.passed:
        failing = [key for epoch in report.epochs for key in epoch.failures()]
        problems.append(f"failed properties: {failing}")
    if case.expected is not None and report.epochs:
        for node, raw in report.epochs[0].outcomes.items():
            outcome = Outcome.from_json(raw)
            if outcome not in case.expected:
                problems.append(f"node {node} ended with {outcome}")
    return CaseResult(name=case.name, passed=not problems, detail="; ".join(problems))


def run_suite(names: Optional[Sequence[str]] = None) -> List[CaseResult]:
    cases = build_suite()
    if names:
        known = {case.name for case in cases}
        unknown = sorted(set(names) - known)
        if unknown:
            raise KeyError(f"Unknown suite cases: {unknown}")
        cases = [case for case in cases if case.name in names]
    results = []
    for case in cases:
        result = run_case(case)
        level = logging.INFO if result.passed else logging.ERROR
        logger.log(level, f"suite case {case.name}: {'pass' if result.passed else 'FAIL'} {result.detail}")
        results.append(result)
    return results
