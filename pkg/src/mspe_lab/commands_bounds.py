"""
The `bounds` command: tables of the analytic deviation bounds
"""

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import Any

import pandas as pd

from . import __version__
from .artifacts import ArtifactWriter, write_csv
from .bounds import bound_report
from .config import LabSettings
from .errors import DomainError
from .models import RunManifest
from .oracle import estimate_response_variance
from .regression import load_dataset_csv

logger = logging.getLogger(__name__)


def register_bounds_command(subparsers: Any) -> None:
    """Registers the bounds command"""
    parser = subparsers.add_parser(
        "bounds", help="Evaluate the deviation bounds, one CSV row per eps"
    )
    parser.add_argument("--n", type=int, required=True, help="Sample size")
    parser.add_argument("--k", type=int, required=True, help="Model order")
    parser.add_argument("--sigma2m", type=float, help="Residual variance sigma^2(m)")
    parser.add_argument("--eps", type=float, nargs="*", help="Deviation thresholds")
    parser.add_argument(
        "--card", type=int, help="Family size for the uniform bound and the rate a_n"
    )
    parser.add_argument(
        "--c", type=float, help="Upper bound on Var[y] for the uniform bound"
    )
    parser.add_argument(
        "--data",
        help="Dataset CSV; its sample variance of y fills --c and --sigma2m",
    )
    parser.add_argument("--out", help="Output directory")
    parser.set_defaults(handler=cmd_bounds)


def cmd_bounds(args: argparse.Namespace, settings: LabSettings) -> int:
    """Write bounds.csv and the manifest, and echo the table on standard output"""
    started = time.perf_counter()
    if not args.eps:
        raise DomainError("At least one --eps value is required")

    sigma2_m, c = args.sigma2m, args.c
    if args.data:
        var_y = estimate_response_variance(load_dataset_csv(args.data))
        logger.info("Sample variance of y in %s: %.6g", args.data, var_y)
        sigma2_m = var_y if sigma2_m is None else sigma2_m
        c = var_y if c is None else c
    if sigma2_m is None:
        raise DomainError("--sigma2m is required unless --data is given")

    reports = [
        bound_report(args.n, args.k, sigma2_m, eps, card=args.card, c=c)
        for eps in args.eps
    ]
    frame = pd.DataFrame([r.model_dump() for r in reports])

    if args.out:
        out_dir = Path(args.out)
    else:
        out_dir = Path(settings.output_dir) / f"bounds-n{args.n}-k{args.k}"
    with ArtifactWriter(out_dir) as writer:
        writer.write_frame("bounds.csv", frame)
        writer.write_manifest(
            RunManifest(
                command="bounds",
                config={
                    "n": args.n,
                    "k": args.k,
                    "sigma2_m": sigma2_m,
                    "eps": list(args.eps),
                    "card": args.card,
                    "c": c,
                    "data": args.data,
                },
                wall_time_s=time.perf_counter() - started,
                tool_version=__version__,
            )
        )

    write_csv(frame, sys.stdout)
    return 0
