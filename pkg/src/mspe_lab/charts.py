"""
Static SVG rendering of scenario results

Top panel: criteria over model order (black) against rho^2 and the
transforms of rho^2 each criterion tracks (gray), with a dot at every
minimum. Bottom panel: coefficient magnitudes.
"""

import logging
from pathlib import Path
from typing import Union

import matplotlib

matplotlib.use("Agg")  # Non-interactive backend

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .search import block_inclusion_order  # noqa: E402
from .simulation import ExperimentResult  # noqa: E402

logger = logging.getLogger(__name__)

# Black curves: (column, label, dash pattern)
CRITERION_STYLES = [
    ("gcv", "GCV", "-"),
    ("aic", "AIC", (0, (8, 3))),
    ("fpe", "FPE", ":"),
    ("aicc", "AICc", (0, (3, 3))),
    ("bic", "BIC", "-."),
]

GRAY_STYLES = [
    ("rho2", "rho2", "-"),
    ("gray_aic", None, (0, (8, 3))),
    ("gray_fpe", None, ":"),
    ("gray_aicc", None, (0, (3, 3))),
    ("gray_bic", None, "-."),
]

GRAY = "0.6"


def _coefficient_profile(result: ExperimentResult) -> np.ndarray:
    """|beta| in natural order, or block by block in greedy-path keep order"""
    magnitudes = np.abs(result.dgp.beta_array())
    if result.path is None or result.config.block_size is None:
        return magnitudes
    size = result.config.block_size
    kept = block_inclusion_order(result.path)
    return np.concatenate([magnitudes[b * size : (b + 1) * size] for b in kept])


def render_scenario_svg(result: ExperimentResult, target: Union[str, Path]) -> None:
    """Write the scenario chart as SVG; output bytes depend only on the result"""
    frame = result.to_frame()
    on_path = result.path is not None
    x = frame["model_id" if on_path else "order"].to_numpy()
    config = result.config

    with plt.rc_context({"svg.hashsalt": "mspe-lab", "svg.fonttype": "path"}):
        fig, (top, bottom) = plt.subplots(
            2, 1, figsize=(8, 7), gridspec_kw={"height_ratios": [3, 1]}
        )

        for column, label, dashes in GRAY_STYLES:
            top.plot(
                x,
                frame[column],
                color=GRAY,
                linestyle=dashes,
                linewidth=1.2,
                label=label,
            )
        for column, label, dashes in CRITERION_STYLES:
            top.plot(
                x,
                frame[column],
                color="black",
                linestyle=dashes,
                linewidth=1.0,
                label=label,
            )

        plotted = {column for column, _, _ in CRITERION_STYLES} | {"rho2"}
        for name, model_id in sorted(result.argmins.items()):
            if name not in plotted:
                continue
            color = GRAY if name == "rho2" else "black"
            point = (x[model_id], frame[name].iloc[model_id])
            top.plot(*point, "o", color=color, markersize=4)
            top.annotate(
                name, point, textcoords="offset points", xytext=(3, 5), fontsize=7
            )

        if result.benchmark is not None:
            top.axhline(result.benchmark.rho2, xmax=0.015, color="black", linewidth=2)

        upper = float(np.nanmax(frame[["gcv", "rho2"]].to_numpy()))
        top.set_ylim(0, 1.05 * upper)
        top.set_xlabel("model (step along the path)" if on_path else "model order k")
        top.set_ylabel("MSPE")
        top.set_title(
            f"Scenario {config.scenario_id}: n={config.n}, p={config.p}, "
            f"seed={config.seed}",
            fontsize=10,
        )
        top.legend(fontsize=7, ncol=2, frameon=False)

        profile = _coefficient_profile(result)
        bottom.vlines(np.arange(profile.size), 0, profile, color="black", linewidth=0.6)
        bottom.set_xlabel(
            "coefficient (blocks in path order)" if on_path else "coefficient index"
        )
        bottom.set_ylabel("|beta|")

        fig.tight_layout()
        fig.savefig(target, format="svg", metadata={"Date": None})
        plt.close(fig)
    logger.debug("Rendered scenario chart to %s", target)
