"""
Harness Module

Scenario-driven runs of the full stack with machine-readable reports.
"""

from app.modules.harness.module import HarnessModule
from app.modules.harness.properties import CLOSURE_KEYS, LIVENESS_KEY, PROPERTY_KEYS, EpochContext, check_epoch
from app.modules.harness.reference import BrachaInstance, ReferenceNode, ReferenceVbb
from app.modules.harness.report import DiffReport, EpochReport, Report, SweepSummary, Verdict, VerdictStatus, Witness
from app.modules.harness.runner import (
    ScenarioRunner,
    build_world,
    diff_scenario,
    legal_outcomes,
    run_reference,
    run_scenario,
    summarize,
    sweep,
)
from app.modules.harness.scenario import Scenario, load_scenario, load_scenario_async, parse_scenario
from app.modules.harness.suite import build_suite, run_suite

# Auto-register module when this package is imported
from app.modules import register_module
register_module(HarnessModule)

__all__ = [
    "HarnessModule",
    "CLOSURE_KEYS",
    "LIVENESS_KEY",
    "PROPERTY_KEYS",
    "EpochContext",
    "check_epoch",
    "BrachaInstance",
    "ReferenceNode",
    "ReferenceVbb",
    "DiffReport",
    "EpochReport",
    "Report",
    "SweepSummary",
    "Verdict",
    "VerdictStatus",
    "Witness",
    "ScenarioRunner",
    "build_world",
    "diff_scenario",
    "legal_outcomes",
    "run_reference",
    "run_scenario",
    "summarize",
    "sweep",
    "Scenario",
    "load_scenario",
    "load_scenario_async",
    "parse_scenario",
    "build_suite",
    "run_suite",
]
