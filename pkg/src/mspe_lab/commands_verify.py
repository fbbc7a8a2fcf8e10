"""
The `verify` command: run a verification suite and report pass/fail per check
"""

import argparse
import logging
import time
from pathlib import Path
from typing import Any

from . import __version__
from .artifacts import ArtifactWriter
from .config import LabSettings, get_worker_count
from .models import RunManifest
from .verification import SUITES, run_suite

logger = logging.getLogger(__name__)

EXIT_CHECK_FAILED = 3


def register_verify_command(subparsers: Any) -> None:
    """Registers the verify command"""
    parser = subparsers.add_parser("verify", help="Run a verification suite")
    parser.add_argument("suite", choices=list(SUITES), help="Suite name")
    parser.add_argument(
        "--reps", type=int, help="Monte Carlo replications (suite default when omitted)"
    )
    parser.add_argument(
        "--seed", type=int, help="Root seed (suite default when omitted)"
    )
    parser.add_argument("--out", help="Output directory")
    parser.set_defaults(handler=cmd_verify)


def cmd_verify(args: argparse.Namespace, settings: LabSettings) -> int:
    """
    Print the JSON report; exit 0 iff every check passed, 3 otherwise

    A suite rejecting its arguments raises before anything is written; a
    suite aborted by a runtime failure still writes its report and exits 1.
    """
    started = time.perf_counter()
    report = run_suite(args.suite, args.reps, args.seed, get_worker_count(settings))

    if args.out:
        out_dir = Path(args.out)
    else:
        out_dir = Path(settings.output_dir) / f"verify-{args.suite}"
    with ArtifactWriter(out_dir) as writer:
        writer.write_json("report.json", report)
        writer.write_manifest(
            RunManifest(
                command="verify",
                config={"suite": args.suite, "reps": args.reps},
                seed=args.seed,
                wall_time_s=time.perf_counter() - started,
                tool_version=__version__,
            )
        )

    print(report.model_dump_json(indent=2))
    if report.error is not None:
        return 1
    return 0 if report.success else EXIT_CHECK_FAILED
