"""
Scenario runner.

Builds a world for a scenario, then per epoch: applies the injection plan (first
epoch only), lets every node propose, runs until the epoch settles or the step
budget runs out, lets the world settle a little longer, checks the property
catalog and recycles.
"""

import asyncio
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Union
import logging

import aiofiles

from app.core.config import settings
from app.core.exceptions import RecycleError, ScenarioError
from app.core.models import ERROR, NodeId, Outcome
from app.modules.faults.byzantine import ByzantineNode
from app.modules.faults.injection import apply_injection
from app.modules.harness.properties import EpochContext, check_epoch, settled
from app.modules.harness.reference import ReferenceNode
from app.modules.harness.report import DiffReport, EpochReport, Report, SweepSummary
from app.modules.harness.scenario import Scenario
from app.modules.mvc.node import MvcNode
from app.modules.recycler.service import off_initial_state, recycle
from app.modules.simnet.node import NodeHandle
from app.modules.simnet.world import SimWorld, run_until

logger = logging.getLogger(__name__)

SSBFT = "ssbft"
REFERENCE = "reference"

_CORES = {SSBFT: MvcNode, REFERENCE: ReferenceNode}


def build_nodes(scenario: Scenario, stack: str = SSBFT) -> List[NodeHandle]:
    core_class = _CORES[stack]
    nodes: List[NodeHandle] = []
    for k in range(scenario.n):
        core = core_class(k, scenario.params, scenario.values, seed=scenario.seed, round_cap=scenario.round_cap)
        strategy = scenario.byzantine.get(k)
        nodes.append(core if strategy is None else ByzantineNode(core, strategy, scenario.n, scenario.seed))
    return nodes


def build_world(scenario: Scenario, stack: str = SSBFT, record_trace: bool = False) -> SimWorld:
    return SimWorld(
        scenario.params,
        build_nodes(scenario, stack),
        seed=scenario.seed,
        channel_capacity=scenario.channel_capacity,
        record_trace=record_trace,
    )


class ScenarioRunner:
    """Drives one scenario on one stack and collects its report"""

    def __init__(
        self,
        scenario: Scenario,
        stack: str = SSBFT,
        record_trace: bool = False,
        after_injection: Optional[Callable[[SimWorld], None]] = None,
    ):
        if stack not in _CORES:
            raise ScenarioError(f"Unknown stack: {stack}")
        if stack == REFERENCE and scenario.injection is not None:
            raise ScenarioError("The reference stack is not self-stabilizing and rejects injection plans")
        self.scenario = scenario
        self.stack = stack
        self.world = build_world(scenario, stack, record_trace)
        self.after_injection = after_injection
        self.byzantine_values = frozenset(
            v for k in scenario.byzantine for v in self._byzantine_proposals(k) if v is not None
        )

    def _byzantine_proposals(self, k: NodeId) -> List[Optional[str]]:
        strategy = self.scenario.byzantine[k]
        if not strategy.runs_core:
            return []
        values = [self.scenario.proposal_for(k)]
        if strategy.kind == "equivocate":
            values.append(strategy.v2)
        return values

    def _propose(self) -> None:
        world = self.world
        for k in range(world.n):
            value = self.scenario.proposal_for(k)
            if value is None:
                continue
            world.submit(k, world.nodes[k].propose(value))

    def _settle(self, closure: bool, budget: int) -> int:
        """Extra steps after the epoch end condition first held, then wait for it again"""
        world = self.world
        for _ in range(settings.settle_steps_for(world.n)):
            world.step()
            if world.quiescent:
                break
        result = run_until(world, lambda w: settled(w, closure), max(budget, 1))
        return result.steps if result.satisfied else -1

    def run_epoch(self, index: int) -> EpochReport:
        world = self.world
        scenario = self.scenario
        injected = index == 0 and scenario.injection is not None
        start = world.clock
        first_event = len(world.events)

        if injected:
            apply_injection(world, scenario.injection)
            if self.after_injection is not None:
                self.after_injection(world)
        self._propose()

        closure = not injected
        result = run_until(world, lambda w: settled(w, closure), scenario.step_budget)
        steps = result.steps
        live = result.satisfied
        if live:
            if self._settle(closure, scenario.step_budget - steps) < 0:
                live = False
        else:
            logger.warning(
                f"Epoch {world.epoch} (seed {scenario.seed}) did not settle within {scenario.step_budget} steps"
            )

        ctx = EpochContext(
            world=world,
            injected=injected,
            proposals={k: scenario.proposals[k] for k in world.correct_ids},
            byzantine_values=self.byzantine_values,
            events=[e for e in world.events[first_event:] if e.epoch == world.epoch],
        )
        verdicts = check_epoch(ctx, live)
        outcomes = {str(k): world.nodes[k].result().to_json() for k in world.correct_ids}
        report = EpochReport(
            epoch=world.epoch,
            injected=injected,
            completed=live,
            steps=steps,
            outcomes=outcomes,
            verdicts=verdicts,
            drops=world.drops,
            stale=world.stale,
            anomalies=world.anomalies,
            forced=world.scheduler.forced,
        )
        logger.info(
            f"[{self.stack}] epoch {world.epoch} seed {scenario.seed}: "
            f"{'settled' if live else 'budget exhausted'} after {world.clock - start} steps, "
            f"failures={report.failures()}"
        )
        return report

    def run(self) -> Report:
        scenario = self.scenario
        report = Report(stack=self.stack, seed=scenario.seed, n=scenario.n, t=scenario.t)
        for index in range(scenario.epochs):
            epoch_report = self.run_epoch(index)
            report.epochs.append(epoch_report)
            if not epoch_report.completed:
                break
            if index + 1 < scenario.epochs:
                try:
                    recycle(self.world)
                except RecycleError:
                    logger.error(f"Recycle failed after epoch {epoch_report.epoch}", exc_info=True)
                    raise
                epoch_report.reset_mismatch = off_initial_state(self.world)
        report.passed = all(e.passed for e in report.epochs) and len(report.epochs) == scenario.epochs
        return report

    def trace_lines(self) -> Iterable[str]:
        return self.world.trace.to_lines()


def run_scenario(scenario: Scenario, record_trace: bool = False) -> Report:
    return ScenarioRunner(scenario, SSBFT, record_trace).run()


def run_reference(scenario: Scenario, record_trace: bool = False) -> Report:
    return ScenarioRunner(scenario, REFERENCE, record_trace).run()


# ----------------------------------------------------------------------
# Differential runs
# ----------------------------------------------------------------------

def legal_outcomes(scenario: Scenario) -> List[Outcome]:
    """{v} for a unanimous correct proposal, every correct value plus ⊠ otherwise"""
    correct_values = sorted({scenario.proposals[k] for k in scenario.correct_ids})
    if len(correct_values) == 1:
        return [Outcome.decided(correct_values[0])]
    return [Outcome.decided(v) for v in correct_values] + [ERROR]


def _final_outcomes(report: Report) -> Dict[str, Outcome]:
    if not report.epochs:
        return {}
    return {k: Outcome.from_json(o) for k, o in report.epochs[-1].outcomes.items()}


def diff_scenario(scenario: Scenario) -> DiffReport:
    """Run both stacks on a fault-free scenario and compare against the legal outcome set"""
    if scenario.injection is not None:
        raise ScenarioError("Differential runs need a scenario without an injection plan")
    ssbft = run_scenario(scenario)
    reference = run_reference(scenario)
    legal = legal_outcomes(scenario)

    ssbft_outcomes = _final_outcomes(ssbft)
    reference_outcomes = _final_outcomes(reference)
    ssbft_agreement = len(set(ssbft_outcomes.values())) <= 1
    reference_agreement = len(set(reference_outcomes.values())) <= 1
    within = all(o in legal for o in list(ssbft_outcomes.values()) + list(reference_outcomes.values()))
    complete = all(not o.is_pending for o in list(ssbft_outcomes.values()) + list(reference_outcomes.values()))
    passed = ssbft_agreement and reference_agreement and within and complete and bool(ssbft_outcomes)
    if not passed:
        logger.warning(f"Differential run failed for seed {scenario.seed}")
    return DiffReport(
        seed=scenario.seed,
        legal=[o.to_json() for o in legal],
        ssbft={k: o.to_json() for k, o in ssbft_outcomes.items()},
        reference={k: o.to_json() for k, o in reference_outcomes.items()},
        ssbft_agreement=ssbft_agreement,
        reference_agreement=reference_agreement,
        passed=passed,
    )


# ----------------------------------------------------------------------
# Sweeps
# ----------------------------------------------------------------------

async def sweep(scenario: Scenario, seeds: Iterable[int], workers: Optional[int] = None) -> List[Report]:
    """Run scenario once per seed, several seeds at a time; reports come back in seed order"""
    semaphore = asyncio.Semaphore(workers or settings.SWEEP_WORKERS)

    async def one(seed: int) -> Report:
        async with semaphore:
            return await asyncio.to_thread(run_scenario, scenario.with_seed(seed))

    return list(await asyncio.gather(*(one(seed) for seed in seeds)))


def summarize(reports: List[Report]) -> SweepSummary:
    failures: Dict[str, int] = {}
    for report in reports:
        for epoch in report.epochs:
            for key in epoch.failures():
                failures[key] = failures.get(key, 0) + 1
    failed = [r.seed for r in reports if not r.passed]
    return SweepSummary(
        seeds=[r.seed for r in reports],
        failed_seeds=failed,
        failures=dict(sorted(failures.items())),
        passed=not failed,
    )


async def write_text(path: Union[str, Path], text: str) -> None:
    async with aiofiles.open(path, "w", encoding="utf-8") as f:
        await f.write(text)


async def write_lines(path: Union[str, Path], lines: Iterable[str]) -> None:
    async with aiofiles.open(path, "w", encoding="utf-8") as f:
        for line in lines:
            await f.write(line)
