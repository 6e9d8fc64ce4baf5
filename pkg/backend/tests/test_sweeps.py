"""
Multi-seed acceptance sweeps.

The quick classes run on every test run. The ones marked slow cover the full
seed ranges (run them with ``pytest -m slow``).
"""

import json
from pathlib import Path
from typing import Iterable, List

import pytest

from app.core.models import Outcome
from app.modules.bc.coin import CommonCoin
from app.modules.bc.consensus import BcObject
from app.modules.faults.injection import InjectionPlan, RandomizeMutation
from app.modules.faults.strategies import (
    CollusionValueStrategy,
    EquivocateStrategy,
    FakeValidFalseStrategy,
    FakeValidTrueStrategy,
    RandomNoiseStrategy,
    SilentStrategy,
)
from app.modules.harness.report import Report, VerdictStatus
from app.modules.harness.runner import diff_scenario, run_scenario, sweep
from app.modules.harness.scenario import Scenario, load_scenario

from conftest import route_bc

SCENARIO_DIR = Path(__file__).resolve().parents[1] / "scenarios"

SIZES = [(4, 1), (7, 2), (10, 3)]

STRATEGIES = [
    SilentStrategy(),
    EquivocateStrategy(v1="a", v2="b"),
    FakeValidTrueStrategy(),
    FakeValidFalseStrategy(),
    CollusionValueStrategy(v_byz="z"),
    RandomNoiseStrategy(seed=5),
]

SAFETY_KEYS = ("bc.agreement", "bc.no_intrusion")


def _byzantine(n: int, t: int, strategy) -> Scenario:
    """t Byzantine nodes at the top ids, correct nodes split between a and b"""
    return Scenario(
        n=n, t=t, values=["a", "b", "z"],
        proposals={k: "a" if k % 2 == 0 else "b" for k in range(n - t)},
        byzantine={k: strategy for k in range(n - t, n)},
    )


def _unanimous(n: int, t: int, value: str = "a", **kwargs) -> Scenario:
    return Scenario(n=n, t=t, values=["a", "b"], proposals={k: value for k in range(n)}, **kwargs)


def _randomized(n: int, t: int, seed: int) -> Scenario:
    plan = InjectionPlan(targets=list(range(n)), mutations=[RandomizeMutation(randomize=seed)])
    return _unanimous(n, t, epochs=2, injection=plan, seed=seed)


def _completed(report: Report) -> bool:
    return all(e.verdicts["liveness"].status is VerdictStatus.PASS for e in report.epochs)


def _assert_acceptance(reports: List[Report], live_share: float = 0.99) -> None:
    """Safety in every run, liveness in live_share of them, every oracle in each completed run"""
    for report in reports:
        for epoch in report.epochs:
            broken = [key for key in SAFETY_KEYS if epoch.verdicts[key].is_failure]
            assert not broken, f"seed {report.seed} epoch {epoch.epoch}: {broken}"
    completed = [r for r in reports if _completed(r)]
    assert len(completed) >= live_share * len(reports), [r.seed for r in reports if not _completed(r)]
    failing = {r.seed: [k for e in r.epochs for k in e.failures()] for r in completed if not r.passed}
    assert not failing, failing


def _assert_converges(scenarios: Iterable[Scenario]) -> None:
    for scenario in scenarios:
        report = run_scenario(scenario)
        assert len(report.epochs) == 2, f"seed {scenario.seed} stopped after the injected epoch"
        injected, clean = report.epochs
        assert injected.completed, f"seed {scenario.seed}: {injected.failures()}"
        assert report.passed, f"seed {scenario.seed}: {[e.failures() for e in report.epochs]}"
        assert clean.reset_mismatch == [] and injected.reset_mismatch == []


class TestBinarySplit:
    """Split proposals under the common coin"""

    def test_decides_within_eight_rounds(self, params4):
        """Nearly every seed decides within eight rounds and no seed disagrees"""
        seeds = range(128)
        late = []
        for seed in seeds:
            objects = [BcObject(k, params4, seed=seed, round_cap=8, coin=CommonCoin()) for k in range(4)]
            route_bc(objects, {k: bc.bc_propose(k % 2 == 0) for k, bc in enumerate(objects)})
            results = [bc.bc_result() for bc in objects]
            decided = {r for r in results if r.is_decided}
            assert len(decided) <= 1, f"seed {seed} disagrees: {results}"
            if not all(r.is_decided for r in results):
                late.append(seed)
        assert len(late) <= len(seeds) // 20, late


class TestQuickSweeps:
    """A few seeds of every acceptance sweep"""

    @pytest.mark.parametrize("strategy", STRATEGIES, ids=lambda s: s.kind)
    async def test_byzantine_n4(self, strategy):
        """Every strategy at n=4 keeps safety and completes"""
        reports = await sweep(_byzantine(4, 1, strategy), range(3), workers=3)
        _assert_acceptance(reports, live_share=1.0)

    def test_randomize_n4(self):
        """Fully randomized n=4 worlds converge and then recycle cleanly"""
        _assert_converges(_randomized(4, 1, seed) for seed in range(5))

    @pytest.mark.parametrize("seed", [0, 13])
    def test_randomize_n7_with_unsupported_deliveries(self, seed):
        """Randomized n=7 states whose corrupted deliveries lack READY support still converge"""
        _assert_converges([_randomized(7, 2, seed)])

    def test_byzantine_report_bytes_repeat(self):
        """Byzantine noise plus injection still gives byte-identical reports"""
        scenario = Scenario(
            n=4, t=1, values=["a", "b"], seed=21, epochs=2,
            proposals={0: "a", 1: "a", 2: "a"},
            byzantine={3: RandomNoiseStrategy(seed=2)},
            injection=InjectionPlan(targets=[0, 1, 2], mutations=[RandomizeMutation(randomize=21)]),
        )
        assert run_scenario(scenario).to_json() == run_scenario(scenario).to_json()


class TestShippedScenarios:
    """Scenario files under backend/scenarios"""

    def test_files_parse(self):
        """Every shipped file is a valid scenario"""
        paths = sorted(SCENARIO_DIR.glob("*.json"))
        assert paths
        for path in paths:
            json.loads(path.read_text(encoding="utf-8"))
            load_scenario(path)

    async def test_unanimous_file_sweeps(self):
        """The unanimous n=4 file passes a short sweep"""
        reports = await sweep(load_scenario(SCENARIO_DIR / "unanimous_n4.json"), range(2), workers=2)
        _assert_acceptance(reports, live_share=1.0)


@pytest.mark.slow
class TestAcceptanceSweeps:
    """Full seed ranges"""

    @pytest.mark.parametrize("strategy", STRATEGIES, ids=lambda s: s.kind)
    @pytest.mark.parametrize("n,t", SIZES)
    async def test_safety_under_every_strategy(self, n, t, strategy):
        """Agreement and no-intrusion in every run, completion in 99% of them"""
        reports = await sweep(_byzantine(n, t, strategy), range(100))
        _assert_acceptance(reports)

    @pytest.mark.parametrize("n,t", SIZES)
    async def test_unanimous_validity(self, n, t):
        """Fault-free unanimous runs always decide the common value"""
        reports = await sweep(_unanimous(n, t, "b"), range(100))
        _assert_acceptance(reports, live_share=1.0)
        for report in reports:
            outcomes = report.epochs[0].outcomes.values()
            assert all(Outcome.from_json(o) == Outcome.decided("b") for o in outcomes), report.seed

    @pytest.mark.parametrize("n,t", [(4, 1), (7, 2)])
    def test_randomize_convergence(self, n, t):
        """Randomized worlds complete the injected epoch and pass the clean one"""
        _assert_converges(_randomized(n, t, seed) for seed in range(100))

    @pytest.mark.parametrize("scenario", [
        _unanimous(4, 1),
        _unanimous(7, 2),
        Scenario(n=10, t=3, values=["v", "w"], proposals={k: "v" if k < 4 else "w" for k in range(10)}),
    ], ids=["unanimous_n4", "unanimous_n7", "split_n10"])
    def test_differential(self, scenario):
        """Both stacks stay within the legal outcomes"""
        failed = [seed for seed in range(50) if not diff_scenario(scenario.with_seed(seed)).passed]
        assert not failed, failed

    @pytest.mark.parametrize("n,t", SIZES)
    def test_reports_repeat(self, n, t):
        """Two runs of one seed give byte-identical reports"""
        scenario = _byzantine(n, t, EquivocateStrategy(v1="a", v2="b")).with_seed(17)
        assert run_scenario(scenario).to_json() == run_scenario(scenario).to_json()


if __name__ == "__main__":
    pytest.main([__file__])
