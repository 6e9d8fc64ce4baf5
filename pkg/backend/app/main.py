"""
Command-line entry point.

    ssbft run <scenario.json> [--seed N] [--trace out.jsonl] [--report out.json] [--stack ssbft|reference]
    ssbft sweep <scenario.json> --seeds A..B [--workers K] [--report out.json]
    ssbft check [--only NAME ...]
    ssbft diff <scenario.json> [--seed N]

Exit codes: 0 when every verdict passes, 1 on a property failure, 2 on a
malformed scenario or bad arguments.
"""

import argparse
import asyncio
import sys
from typing import List, Optional, Sequence
import logging

from app.core.config import settings
from app.core.exceptions import InjectionError, ScenarioError
from app.core.logging_config import setup_logging
from app.modules import get_all_modules, import_all_modules
from app.modules.harness.runner import (
    REFERENCE,
    SSBFT,
    ScenarioRunner,
    diff_scenario,
    summarize,
    sweep,
    write_lines,
    write_text,
)
from app.modules.harness.scenario import Scenario, load_scenario
from app.modules.harness.suite import run_suite

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_MALFORMED = 2


def parse_seed_range(text: str) -> range:
    """'A..B' (inclusive) or a single seed"""
    try:
        if ".." in text:
            low, high = (int(part) for part in text.split("..", 1))
        else:
            low = high = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}")
    if high < low:
        raise argparse.ArgumentTypeError(f"empty seed range {text!r}")
    return range(low, high + 1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ssbft", description="SSBFT multivalued consensus harness")
    sub = parser.add_subparsers(dest="cmd", required=True)

    run = sub.add_parser("run", help="run one scenario")
    run.add_argument("scenario")
    run.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    run.add_argument("--trace", default=None, help="write the step trace as JSON lines")
    run.add_argument("--report", default=None, help="write the report here instead of stdout")
    run.add_argument("--stack", choices=[SSBFT, REFERENCE], default=SSBFT)

    sw = sub.add_parser("sweep", help="run one scenario over a seed range")
    sw.add_argument("scenario")
    sw.add_argument("--seeds", type=parse_seed_range, required=True, help="inclusive range A..B")
    sw.add_argument("--workers", type=int, default=None)
    sw.add_argument("--report", default=None, help="write every report as a JSON array")

    check = sub.add_parser("check", help="run the built-in property suite")
    check.add_argument("--only", nargs="*", default=None, help="run only the named cases")

    diff = sub.add_parser("diff", help="compare the SSBFT stack with the reference stack")
    diff.add_argument("scenario")
    diff.add_argument("--seed", type=int, default=None)
    return parser


def _load(path: str, seed: Optional[int]) -> Scenario:
    scenario = load_scenario(path)
    return scenario if seed is None else scenario.with_seed(seed)


def cmd_run(args: argparse.Namespace) -> int:
    scenario = _load(args.scenario, args.seed)
    runner = ScenarioRunner(scenario, args.stack, record_trace=args.trace is not None)
    report = runner.run()
    text = report.to_json()
    if args.report:
        asyncio.run(write_text(args.report, text))
    else:
        print(text)
    if args.trace:
        asyncio.run(write_lines(args.trace, runner.trace_lines()))
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_sweep(args: argparse.Namespace) -> int:
    scenario = _load(args.scenario, None)
    reports = asyncio.run(sweep(scenario, args.seeds, args.workers))
    summary = summarize(reports)
    if args.report:
        body = "[\n" + ",\n".join(report.to_json() for report in reports) + "\n]\n"
        asyncio.run(write_text(args.report, body))
    print(summary.to_json())
    return EXIT_PASS if summary.passed else EXIT_FAIL


def cmd_check(args: argparse.Namespace) -> int:
    try:
        results = run_suite(args.only)
    except KeyError as e:
        print(f"error: {e.args[0]}", file=sys.stderr)
        return EXIT_MALFORMED
    for result in results:
        status = "pass" if result.passed else "FAIL"
        print(f"{status:4}  {result.name}  {result.detail}".rstrip())
    return EXIT_PASS if all(result.passed for result in results) else EXIT_FAIL


def cmd_diff(args: argparse.Namespace) -> int:
    scenario = _load(args.scenario, args.seed)
    report = diff_scenario(scenario)
    print(report.to_json())
    return EXIT_PASS if report.passed else EXIT_FAIL


COMMANDS = {
    "run": cmd_run,
    "sweep": cmd_sweep,
    "check": cmd_check,
    "diff": cmd_diff,
}


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    # Logging first so every module logs through the configured handlers
    setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_MALFORMED if e.code else EXIT_PASS

    settings.validate_settings()
    import_all_modules()
    logger.debug(f"Registered modules: {[m().get_module_name() for m in get_all_modules()]}")

    try:
        return COMMANDS[args.cmd](args)
    except (ScenarioError, InjectionError) as e:
        logger.error(f"Malformed scenario: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_MALFORMED


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
