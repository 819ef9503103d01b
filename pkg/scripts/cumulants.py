#!/usr/bin/env python3
"""
Command-line entry point: cumulant tables, cross-method comparison and
verification suites.

    python scripts/cumulants.py cumulants --dist exponential1 --max-order 4 --methods moments,theorem1
    python scripts/cumulants.py compare --dist uniform01 --max-order 5 --methods theorem1,factorized
    python scripts/cumulants.py verify shuffle
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.append(str(project_root))

from config.run_config import DEFAULT_METHODS, RunConfig
from config.settings import settings
from models.errors import (
    CumulantKitError,
    DataFormatError,
    InvalidParameterError,
    MemoryBudgetError,
    ModelError,
    NumericalGuardError,
    RangeError,
    SizeLimitError,
    UsageError,
)
from services.cumulant_service import cmd_compare, cmd_cumulants
from services.reports import report_schema, write_report
from services.verification import SUITES, cmd_verify

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

USAGE_ERRORS = (UsageError, DataFormatError, SizeLimitError, InvalidParameterError, ValidationError)
NUMERICAL_ERRORS = (NumericalGuardError, ModelError, RangeError, MemoryBudgetError)


def _add_output_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--format", dest="output_format", choices=("json", "csv"), default="json")
    parser.add_argument("--output", type=Path, default=None, help="write the report here instead of stdout")
    parser.add_argument("--verbose", "-v", action="store_true", help="log progress to stderr")


def _add_run_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--dist", required=True,
                        help="uniform01 | exponential1 | stdnormal | twopoint(p,x0,x1) | grid:<path> | samples:<path>")
    parser.add_argument("--max-order", type=int, default=4)
    parser.add_argument("--methods", default=",".join(DEFAULT_METHODS),
                        help="comma-separated subset of moments,truncated,theorem1,factorized,mrl")
    parser.add_argument("--eps-tail", type=float, default=None)
    parser.add_argument("--grid-points", type=int, default=None)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--rel-tol", type=float, default=1e-3)
    parser.add_argument("--abs-tol", type=float, default=1e-5)
    _add_output_flags(parser)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cumulants", description="Cumulants from iterated integrals of the CDF")
    commands = parser.add_subparsers(dest="command", required=True)

    _add_run_flags(commands.add_parser("cumulants", help="cumulant table per order and method"))
    _add_run_flags(commands.add_parser("compare", help="pairwise deviations between methods"))

    verify = commands.add_parser("verify", help="run a verification suite")
    verify.add_argument("suite", choices=SUITES)
    verify.add_argument("--seed", type=int, default=0)
    _add_output_flags(verify)

    schema = commands.add_parser("schema", help="print the JSON schema of the reports")
    schema.add_argument("--output", type=Path, default=None)
    schema.add_argument("--verbose", "-v", action="store_true")
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    values = dict(
        dist_spec=args.dist,
        max_order=args.max_order,
        methods=args.methods,
        output_format=args.output_format,
        seed=args.seed,
        rel_tol=args.rel_tol,
        abs_tol=args.abs_tol,
    )
    if args.eps_tail is not None:
        values["eps_tail"] = args.eps_tail
    if args.grid_points is not None:
        values["grid_points"] = args.grid_points
    return RunConfig(**values)


def _emit(text: str, output: Optional[Path]):
    if output is None:
        sys.stdout.write(text)


def run(args: argparse.Namespace) -> int:
    if args.command == "schema":
        text = json.dumps(report_schema(), indent=2) + "\n"
        if args.output is not None:
            args.output.write_text(text, encoding="utf-8")
        _emit(text, args.output)
        return EXIT_OK

    if args.command == "verify":
        report = cmd_verify(args.suite, args.seed)
        _emit(write_report(report, args.output_format, args.output), args.output)
        failed = [c.name for c in report.checks if not c.passed]
        if failed:
            print(f"❌ {args.suite}: {len(failed)} of {len(report.checks)} checks failed: {', '.join(failed)}",
                  file=sys.stderr)
            return EXIT_TOLERANCE
        print(f"✅ {args.suite}: all {len(report.checks)} checks passed", file=sys.stderr)
        return EXIT_OK

    cfg = _run_config(args)
    report = cmd_cumulants(cfg) if args.command == "cumulants" else cmd_compare(cfg)
    _emit(write_report(report, cfg.output_format, args.output), args.output)
    if report.passed is False:
        failing = [f"{d.method_a}/{d.method_b}" for d in report.deviations if not d.passed]
        print(f"❌ tolerance exceeded for {', '.join(failing)}", file=sys.stderr)
        return EXIT_TOLERANCE
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    level = logging.INFO if args.verbose else getattr(logging, settings.log_level.upper(), logging.WARNING)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(asctime)s %(name)s %(levelname)s: %(message)s")

    try:
        return run(args)
    except USAGE_ERRORS as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_USAGE
    except NUMERICAL_ERRORS as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except CumulantKitError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
