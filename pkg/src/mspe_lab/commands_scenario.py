"""
The `scenario` command: one realization of a simulation scenario
"""

import argparse
import logging
import time
from pathlib import Path
from typing import Any, Dict

import numpy as np
import pandas as pd

from . import __version__
from .artifacts import ArtifactWriter
from .charts import render_scenario_svg
from .config import (
    LabSettings,
    build_scenario_config,
    get_worker_count,
    read_scenario_document,
)
from .models import DistributionKind, RunManifest, Scale, ScenarioConfig
from .simulation import ExperimentResult, run_scenario_experiment, run_seed_dispersion

logger = logging.getLogger(__name__)

# Flag name -> ScenarioConfig field
FLAG_FIELDS = {
    "id": "scenario_id",
    "scale": "scale",
    "seed": "seed",
    "n": "n",
    "p": "p",
    "block_size": "block_size",
    "snr": "snr_target",
    "x_dist": "x_dist",
    "u_dist": "u_dist",
    "replications": "replications",
}

DISTRIBUTIONS = [d.value for d in DistributionKind]


def register_scenario_command(subparsers: Any) -> None:
    """Registers the scenario command"""
    parser = subparsers.add_parser(
        "scenario", help="Run a simulation scenario and write its result table"
    )
    parser.add_argument(
        "--config", help="ScenarioConfig JSON file; flags override its fields"
    )
    parser.add_argument("--id", type=int, choices=[1, 2, 3], help="Scenario number")
    parser.add_argument(
        "--scale",
        choices=[s.value for s in Scale],
        help="Problem size (default: desk)",
    )
    parser.add_argument("--seed", type=int, help="Root seed of all randomness")
    parser.add_argument("--n", type=int, help="Sample size")
    parser.add_argument("--p", type=int, help="Number of candidate regressors")
    parser.add_argument(
        "--block-size", type=int, help="Block length for scenarios 2 and 3"
    )
    parser.add_argument("--snr", type=float, help="Signal-to-noise ratio (default: 5)")
    parser.add_argument("--x-dist", choices=DISTRIBUTIONS, help="Law of the regressors")
    parser.add_argument("--u-dist", choices=DISTRIBUTIONS, help="Law of the error")
    parser.add_argument(
        "--replications",
        type=int,
        help="Realizations; > 1 also writes dispersion.csv",
    )
    parser.add_argument("--out", help="Output directory")
    parser.add_argument("--svg", action="store_true", help="Also render chart.svg")
    parser.set_defaults(handler=cmd_scenario)


def resolve_config(args: argparse.Namespace) -> ScenarioConfig:
    """
    Merge the optional config file with the flags given on the command line

    Only the fields the file sets are merged, flags win, and the result is
    validated once, so n, p and block_size not set anywhere follow the
    final scenario and scale.
    """
    fields: Dict[str, Any] = {}
    if args.config:
        fields = read_scenario_document(args.config)
    for flag, key in FLAG_FIELDS.items():
        value = getattr(args, flag)
        if value is not None:
            fields[key] = value
    return build_scenario_config(**fields)


def coefficient_frame(result: ExperimentResult) -> pd.DataFrame:
    beta = result.dgp.beta_array()
    return pd.DataFrame(
        {"index": np.arange(beta.size), "beta": beta, "abs_beta": np.abs(beta)}
    )


def cmd_scenario(args: argparse.Namespace, settings: LabSettings) -> int:
    """Run the scenario and publish its tables, optional chart and manifest"""
    started = time.perf_counter()
    config = resolve_config(args)
    workers = get_worker_count(settings)
    if args.out:
        out_dir = Path(args.out)
    else:
        name = f"scenario{config.scenario_id}-{config.scale.value}-seed{config.seed}"
        out_dir = Path(settings.output_dir) / name

    with ArtifactWriter(out_dir) as writer:
        result = run_scenario_experiment(config, 0, workers)
        writer.write_frame("results.csv", result.to_frame())
        writer.write_frame("coefficients.csv", coefficient_frame(result))
        if result.path is not None:
            writer.write_frame("path.csv", result.path.to_frame())
        if config.replications > 1:
            dispersion = run_seed_dispersion(config, max_workers=workers)
            writer.write_frame("dispersion.csv", dispersion.frame)
            logger.info(
                "Dispersion over %d replications:\n%s",
                config.replications,
                dispersion.summary(),
            )
        if args.svg:
            render_scenario_svg(result, writer.path("chart.svg"))

        summary: Dict[str, Any] = {
            "argmins": result.argmins,
            "sup_gcv_gap": result.sup_gcv_gap,
            "max_rho2": result.max_rho2,
        }
        if result.benchmark is not None:
            summary["benchmark_order"] = result.benchmark.order
            summary["benchmark_rho2"] = result.benchmark.rho2
        writer.write_json("summary.json", summary)

        writer.write_manifest(
            RunManifest(
                command="scenario",
                config=config.model_dump(mode="json"),
                seed=config.seed,
                wall_time_s=time.perf_counter() - started,
                tool_version=__version__,
            )
        )

    print(out_dir)
    return 0
