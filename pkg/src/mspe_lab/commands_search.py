"""
The `search` command: greedy block elimination on user data and model selection
"""

import argparse
import logging
import time
from pathlib import Path
from typing import Any

from . import __version__
from .artifacts import ArtifactWriter
from .config import LabSettings, get_worker_count
from .criteria import criterion_record_from_rss
from .errors import ConfigError
from .models import CriterionKind, RunManifest
from .regression import load_dataset_csv
from .search import BlockPartition, greedy_block_elimination, select_best

logger = logging.getLogger(__name__)


def register_search_command(subparsers: Any) -> None:
    """Registers the search command"""
    parser = subparsers.add_parser(
        "search", help="Greedy block search and selection on a dataset"
    )
    parser.add_argument(
        "--data", required=True, help="Dataset CSV with header y,x0,...,x{p-1}"
    )
    blocks = parser.add_mutually_exclusive_group(required=True)
    blocks.add_argument(
        "--block-size", type=int, help="Consecutive blocks of this length"
    )
    blocks.add_argument("--blocks", help="Explicit blocks, e.g. '0-1;2-3;4,5'")
    parser.add_argument(
        "--criterion",
        choices=[k.value for k in CriterionKind],
        default=CriterionKind.GCV.value,
        help="Selection criterion (default: gcv)",
    )
    parser.add_argument("--out", help="Output directory")
    parser.set_defaults(handler=cmd_search)


def cmd_search(args: argparse.Namespace, settings: LabSettings) -> int:
    """Write path.csv, selection.json and the manifest; print the selection line"""
    started = time.perf_counter()
    data = load_dataset_csv(args.data)
    if args.blocks:
        partition = BlockPartition.parse(args.blocks)
    else:
        partition = BlockPartition.consecutive(data.p, args.block_size)
    if partition.p_active != data.p:
        raise ConfigError(
            f"Blocks cover {partition.p_active} columns, dataset has {data.p}"
        )

    kind = CriterionKind(args.criterion)
    path = greedy_block_elimination(data, partition, get_worker_count(settings))
    # The path already carries each model's rss
    records = [
        criterion_record_from_rss(s.mask, s.rss, data.n, [kind]) for s in path.steps
    ]
    # AICc is undefined for the largest orders
    available = [r for r in records if kind in r.values]
    best = select_best(available, kind)
    step = path.masks.index(best)
    value = records[step].values[kind]

    frame = path.to_frame()
    frame[kind.value] = [r.values.get(kind) for r in records]
    selection = {
        "criterion": kind.value,
        "step": step,
        "order": best.order,
        "value": value,
        "included": list(best.included),
        "eliminated_blocks": [s.eliminated_block for s in path.steps[1 : step + 1]],
    }

    if args.out:
        out_dir = Path(args.out)
    else:
        out_dir = Path(settings.output_dir) / f"search-{Path(args.data).stem}"
    with ArtifactWriter(out_dir) as writer:
        writer.write_frame("path.csv", frame)
        writer.write_json("selection.json", selection)
        writer.write_manifest(
            RunManifest(
                command="search",
                config={
                    "data": args.data,
                    "blocks": [list(b) for b in partition.blocks],
                    "criterion": kind.value,
                },
                wall_time_s=time.perf_counter() - started,
                tool_version=__version__,
            )
        )

    print(f"selected step={step} order={best.order} {kind.value}={value:.10g}")
    return 0
