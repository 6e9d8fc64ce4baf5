"""
Tests for scenarios, property checkers, the runner and the shipped suite.
"""

import json

import pytest
import pytest_asyncio

from app.core.exceptions import ScenarioError
from app.core.models import ERROR, Outcome, SystemParams
from app.modules.faults.injection import FieldMutation, InjectionPlan
from app.modules.faults.strategies import CollusionValueStrategy, SilentStrategy
from app.modules.harness.properties import (
    CLOSURE_KEYS,
    LIVENESS_KEY,
    PROPERTY_KEYS,
    EpochContext,
    check_bc_agreement,
    check_bc_no_intrusion,
    check_bc_validity,
    check_epoch,
)
from app.modules.harness.report import VerdictStatus
from app.modules.harness.runner import (
    REFERENCE,
    ScenarioRunner,
    diff_scenario,
    legal_outcomes,
    run_reference,
    run_scenario,
    summarize,
    sweep,
)
from app.modules.harness.scenario import Scenario, load_scenario_async, parse_scenario
from app.modules.harness.suite import build_suite, run_suite
from app.modules.mvc.node import MvcNode
from app.modules.simnet.world import SimWorld

VALUES = ["a", "b", "z"]


def _scenario_dict(**overrides) -> dict:
    data = {"n": 4, "t": 1, "values": ["a", "b"], "proposals": {"0": "a", "1": "a", "2": "a", "3": "a"}}
    data.update(overrides)
    return data


def _decide(node: MvcNode, value: str) -> None:
    """Force node into Decided(value) through its own state"""
    node.inject("bc.decision", {"tag": "decided", "value": True})
    for sender in range(3):
        node.inject(f"brb.init.{sender}.delivered", [sender, value])
        node.inject(f"brb.valid.{sender}.delivered", [sender, True])


@pytest.fixture
def world4():
    params = SystemParams(n=4, t=1)
    return SimWorld(params, [MvcNode(k, params, VALUES) for k in range(4)])


@pytest_asyncio.fixture
async def scenario_file(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(_scenario_dict(seed=9)), encoding="utf-8")
    yield path


class TestScenario:
    """Scenario parsing and validation"""

    def test_parse_minimal(self):
        """Missing simulation keys take the defaults"""
        scenario = parse_scenario(json.dumps(_scenario_dict()))
        assert scenario.params == SystemParams(n=4, t=1)
        assert scenario.epochs == 1
        assert scenario.proposal_for(2) == "a"

    @pytest.mark.parametrize("overrides", [
        {"n": 3},
        {"values": ["a", "a"]},
        {"proposals": {"0": "a", "1": "a", "2": "a"}},
        {"proposals": {"0": "a", "1": "a", "2": "a", "3": "q"}},
        {"byzantine": {"2": {"kind": "silent"}, "3": {"kind": "silent"}}},
        {"byzantine": {"7": {"kind": "silent"}}},
        {"surprise": 1},
    ])
    def test_malformed_rejected(self, overrides):
        """Every malformed scenario raises ScenarioError"""
        with pytest.raises(ScenarioError):
            parse_scenario(json.dumps(_scenario_dict(**overrides)))

    def test_byzantine_default_proposal(self):
        """A Byzantine node without a proposal uses its strategy's default"""
        scenario = Scenario(
            n=4, t=1, values=VALUES, proposals={0: "a", 1: "a", 2: "a"},
            byzantine={3: CollusionValueStrategy(v_byz="z")},
        )
        assert scenario.proposal_for(3) == "z"
        assert scenario.correct_ids == [0, 1, 2]

    def test_injection_on_byzantine_rejected(self):
        """Byzantine nodes cannot be injection targets"""
        with pytest.raises(ScenarioError):
            parse_scenario(json.dumps(_scenario_dict(
                byzantine={"3": {"kind": "silent"}},
                proposals={"0": "a", "1": "a", "2": "a"},
                injection={"targets": [3]},
            )))

    async def test_load_async(self, scenario_file):
        """Scenario files load through aiofiles too"""
        scenario = await load_scenario_async(scenario_file)
        assert scenario.seed == 9

    async def test_load_missing_file(self, tmp_path):
        """A missing file is a malformed scenario"""
        with pytest.raises(ScenarioError):
            await load_scenario_async(tmp_path / "missing.json")


class TestPropertyCheckers:
    """Checkers on hand-built end states"""

    def _ctx(self, world, proposals=None, byzantine_values=frozenset(), injected=False):
        return EpochContext(
            world=world,
            injected=injected,
            proposals=proposals or {k: "a" for k in range(4)},
            byzantine_values=byzantine_values,
        )

    def test_agreement_failure_has_witness(self, world4):
        """Different non-pending results violate agreement"""
        world4.nodes[0].inject("bc.decision", {"tag": "decided", "value": False})
        _decide(world4.nodes[1], "b")
        verdict = check_bc_agreement(self._ctx(world4))
        assert verdict.status is VerdictStatus.FAIL
        assert verdict.witness.nodes == [0, 1]

    def test_validity_needs_unanimous_value(self, world4):
        """Deciding anything but the unanimous proposal violates validity"""
        _decide(world4.nodes[0], "b")
        assert check_bc_validity(self._ctx(world4)).is_failure

    def test_validity_vacuous_on_split(self, world4):
        """Split proposals make validity vacuous"""
        _decide(world4.nodes[0], "b")
        proposals = {0: "a", 1: "b", 2: "a", 3: "b"}
        assert check_bc_validity(self._ctx(world4, proposals)).status is VerdictStatus.PASS

    def test_no_intrusion(self, world4):
        """A value only Byzantine nodes proposed must never be decided"""
        _decide(world4.nodes[2], "z")
        verdict = check_bc_no_intrusion(self._ctx(world4, byzantine_values=frozenset({"z"})))
        assert verdict.is_failure
        assert verdict.witness.values == ["z"]

    def test_injected_epoch_skips_closure(self, world4):
        """Closure checks are skipped after injection; liveness is always reported"""
        verdicts = check_epoch(self._ctx(world4, injected=True), live=False)
        assert set(verdicts) == set(PROPERTY_KEYS) | {LIVENESS_KEY}
        assert all(verdicts[key].status is VerdictStatus.SKIPPED for key in CLOSURE_KEYS)
        assert verdicts[LIVENESS_KEY].is_failure


class TestRunner:
    """Whole runs on both stacks"""

    def test_unanimous_run_passes(self):
        """A fault-free unanimous scenario passes every property"""
        report = run_scenario(Scenario(**_scenario_dict(seed=4)))
        assert report.passed
        assert report.epochs[0].outcomes == {str(k): {"tag": "decided", "value": "a"} for k in range(4)}

    def test_same_seed_same_bytes(self):
        """Reports are byte-identical for the same scenario and seed"""
        scenario = Scenario(**_scenario_dict(seed=6, epochs=2))
        assert run_scenario(scenario).to_json() == run_scenario(scenario).to_json()

    def test_two_epochs_recycle_cleanly(self):
        """Multi-epoch runs recycle into clean states"""
        report = run_scenario(Scenario(**_scenario_dict(seed=1, epochs=2)))
        assert [e.epoch for e in report.epochs] == [0, 1]
        assert all(e.reset_mismatch == [] for e in report.epochs)
        assert report.passed

    def test_silent_byzantine_node(self):
        """n−t correct nodes suffice"""
        scenario = Scenario(
            n=4, t=1, values=VALUES, proposals={0: "b", 1: "b", 2: "b"},
            byzantine={3: SilentStrategy()}, seed=2,
        )
        report = run_scenario(scenario)
        assert report.passed
        assert set(report.epochs[0].outcomes) == {"0", "1", "2"}

    def test_reference_stack(self):
        """The non-stabilizing reference stack decides the unanimous value"""
        report = run_reference(Scenario(**_scenario_dict(seed=3)))
        assert report.stack == REFERENCE
        assert all(Outcome.from_json(o) == Outcome.decided("a") for o in report.epochs[0].outcomes.values())

    def test_reference_rejects_injection(self):
        """Injection plans only make sense on the stabilizing stack"""
        scenario = Scenario(**_scenario_dict(injection={"targets": [0]}))
        with pytest.raises(ScenarioError):
            ScenarioRunner(scenario, REFERENCE)

    def test_legal_outcomes(self):
        """Unanimous: only v; split: every correct value or ⊠"""
        assert legal_outcomes(Scenario(**_scenario_dict())) == [Outcome.decided("a")]
        split = Scenario(**_scenario_dict(proposals={"0": "b", "1": "a", "2": "a", "3": "b"}))
        assert legal_outcomes(split) == [Outcome.decided("a"), Outcome.decided("b"), ERROR]

    def test_diff_unanimous(self):
        """Both stacks agree on a unanimous run"""
        assert diff_scenario(Scenario(**_scenario_dict(seed=5))).passed

    def test_pre_decided_binary_object(self):
        """A binary object injected as decided true cannot fake a value"""
        scenario = Scenario(
            n=4, t=1, values=["a", "b", "c", "d"], proposals={0: "a", 1: "b", 2: "c", 3: "d"},
            injection=InjectionPlan(
                targets=[0, 1, 2, 3],
                mutations=[FieldMutation(path="bc.decision", value={"tag": "decided", "value": True})],
            ),
        )
        report = run_scenario(scenario)
        assert all(Outcome.from_json(o) is ERROR for o in report.epochs[0].outcomes.values())

    async def test_sweep_orders_by_seed(self):
        """Sweeps return one report per seed, in seed order"""
        reports = await sweep(Scenario(**_scenario_dict()), range(3), workers=2)
        assert [r.seed for r in reports] == [0, 1, 2]
        summary = summarize(reports)
        assert summary.passed and summary.failed_seeds == []


class TestSuite:
    """The shipped suite"""

    def test_case_names_unique(self):
        """Cases are addressable by name"""
        names = [case.name for case in build_suite()]
        assert len(names) == len(set(names))

    def test_unknown_case(self):
        """Unknown names are refused"""
        with pytest.raises(KeyError):
            run_suite(["no_such_case"])

    @pytest.mark.parametrize("name", [
        "unanimous_n4",
        "byzantine_silent",
        "inject_valid_without_init",
        "inject_binary_pre_decided",
    ])
    def test_case_passes(self, name):
        """Selected shipped cases pass"""
        [result] = run_suite([name])
        assert result.passed, result.detail


if __name__ == "__main__":
    pytest.main([__file__])
