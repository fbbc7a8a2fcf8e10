"""
Executable verification suites: distributional laws, bound dominance,
rate-function inequalities and robustness of the GCV-type estimates
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

import numpy as np

from .bounds import (
    chisq_tail_bound,
    deviation_bound_a4,
    deviation_bound_thm32,
    rate_function_K,
    rate_function_L,
    ratio_tail_bound,
    sp_deviation_bound_a5,
)
from .errors import DomainError, MspeLabError
from .models import (
    CheckResult,
    DgpSpec,
    DistributionKind,
    ModelMask,
    Scale,
    ScenarioConfig,
    StatisticKind,
    StatisticSpec,
    TailEstimate,
    TailSide,
    VerifyReport,
)
from .simulation import (
    mc_fitted_deviations,
    mc_tail_probability,
    mc_verify_prop31,
    run_scenario_experiment,
)

logger = logging.getLogger(__name__)

# Slack, in Monte Carlo standard errors, granted to empirical tail frequencies
MC_SLACK = 4.0
ANALYTIC_TOL = 1e-12
FITTED_CELL_REPS = 20_000


def _check(
    name: str,
    passed: bool,
    observed: float,
    required: str,
    detail: Optional[str] = None,
) -> CheckResult:
    return CheckResult(
        name=name,
        passed=bool(passed),
        observed=float(observed),
        required=required,
        detail=detail,
    )


def _dominance_check(name: str, bound: float, tail: TailEstimate) -> CheckResult:
    slack = tail.estimate - MC_SLACK * tail.std_error
    return _check(
        name, slack <= bound, tail.estimate, f"<= {bound:.6g} + {MC_SLACK:g} SE"
    )


def suite_prop31(
    reps: int, seed: int, max_workers: Optional[int] = None
) -> List[CheckResult]:
    """Laws of rho^2, RSS and S_p at n=60, order 20, omitting 5 unit coefficients"""
    n, p, k = 60, 30, 20
    dgp = DgpSpec(beta=[1.0] * 25 + [0.0] * (p - 25), sigma=1.0)
    mask = ModelMask.leading(k, p)
    report = mc_verify_prop31(n, k, dgp, mask, reps, seed, max_workers)
    assert report.var_rho2_exact is not None and report.ks_distance is not None

    exact = report.var_rho2_exact
    mean_tol = 3 * math.sqrt(exact / reps)
    var_rel = abs(report.var_rho2_empirical - exact) / exact
    rss_var_rel = abs(report.rss_var - 2 * report.rss_df) / (2 * report.rss_df)
    return [
        _check(
            "rho2_ks_distance",
            report.ks_distance < 0.02,
            report.ks_distance,
            "< 0.02",
        ),
        _check(
            "rho2_mean",
            abs(report.mean_rho2 - report.r2) < mean_tol,
            report.mean_rho2,
            f"within {mean_tol:.4g} of R2={report.r2:.6g}",
        ),
        _check(
            "rho2_variance",
            var_rel < 0.10,
            var_rel,
            "relative error < 0.10",
            detail=f"exact={exact:.6g}, approx={report.var_rho2_approx:.6g}",
        ),
        _check(
            "rss_mean",
            abs(report.rss_mean - report.rss_df) < 3 * report.rss_mean_se,
            report.rss_mean,
            f"within 3 SE of {report.rss_df}",
        ),
        _check(
            "rss_variance",
            rss_var_rel < 0.10,
            rss_var_rel,
            f"relative error to {2 * report.rss_df} < 0.10",
        ),
        _check(
            "sp_unbiased",
            abs(report.sp_mean - report.r2) < 3 * report.sp_se,
            report.sp_mean,
            f"within 3 SE of R2={report.r2:.6g}",
        ),
    ]


def suite_dominance(
    reps: int, seed: int, max_workers: Optional[int] = None
) -> List[CheckResult]:
    """
    Analytic tail bounds against Monte Carlo tail frequencies

    The chi-square building blocks use 10 * reps draws per cell; the
    deviation cells use reps draws. The fitted cells refit a Gaussian
    design min(reps, 20000) times, so they exercise the least squares fits
    and the oracle rather than the sampled laws.
    """
    checks: List[CheckResult] = []
    block_reps = 10 * reps
    cell = 0

    def dominates(
        name: str, bound: float, spec: StatisticSpec, threshold: float, draws: int
    ) -> CheckResult:
        nonlocal cell
        cell += 1
        tail = mc_tail_probability(spec, threshold, draws, seed + cell)
        return _dominance_check(name, bound, tail)

    for a in (2, 10, 50):
        for b in (2, 10, 50):
            for eps in (0.1, 0.5, 1.0):
                for side in TailSide:
                    spec = StatisticSpec(kind=StatisticKind.RATIO, a=a, b=b, side=side)
                    bound = ratio_tail_bound(a, b, eps, side)
                    name = f"ratio_{side.value}[a={a},b={b},eps={eps}]"
                    checks.append(dominates(name, bound, spec, eps, block_reps))

    for b in (5, 20, 100):
        for eps in (0.2, 0.5, 1.5):
            for side in TailSide:
                spec = StatisticSpec(kind=StatisticKind.CHISQ, b=b, side=side)
                bound = chisq_tail_bound(b, eps, side)
                name = f"chisq_{side.value}[b={b},eps={eps}]"
                checks.append(dominates(name, bound, spec, eps, block_reps))

    sigma2_m = 1.5
    for n in (50, 200):
        for ratio in (0.2, 0.5, 0.8):
            k = int(round(ratio * n))
            rho_spec = StatisticSpec(
                kind=StatisticKind.RHO_HAT_DEVIATION, n=n, k=k, sigma2_m=sigma2_m
            )
            sp_spec = StatisticSpec(
                kind=StatisticKind.SP_DEVIATION, n=n, k=k, sigma2_m=sigma2_m
            )
            for mult in (0.2, 0.5, 1.0, 2.0):
                eps = mult * sigma2_m
                label = f"[n={n},k={k},eps={mult:g}s2]"
                a4 = deviation_bound_a4(n, k, sigma2_m, eps)
                thm32 = deviation_bound_thm32(n, k, sigma2_m, eps)
                a5 = sp_deviation_bound_a5(n, k, sigma2_m, eps)

                rho_name = f"rho_hat_deviation{label}"
                checks.append(dominates(rho_name, a4.total, rho_spec, eps, reps))
                checks.append(
                    _check(
                        f"a4_below_simple{label}",
                        a4.total <= thm32 + ANALYTIC_TOL,
                        a4.total,
                        f"<= {thm32:.6g}",
                    )
                )
                checks.append(
                    dominates(f"sp_deviation{label}", a5.total, sp_spec, eps, reps)
                )
                checks.append(
                    _check(
                        f"a5_below_psi_form{label}",
                        a5.total <= a5.psi_form + ANALYTIC_TOL,
                        a5.total,
                        f"<= {a5.psi_form:.6g}",
                    )
                )

    checks.extend(_fitted_dominance(min(reps, FITTED_CELL_REPS), seed, max_workers))
    return checks


def _fitted_dominance(
    reps: int, seed: int, max_workers: Optional[int]
) -> List[CheckResult]:
    """Bounds against tail frequencies of actual fits, n=40, ten unit coefficients"""
    n, p = 40, 30
    dgp = DgpSpec(beta=[1.0] * 10 + [0.0] * (p - 10), sigma=1.0)
    checks: List[CheckResult] = []
    for cell, k in enumerate((8, 20)):
        mask = ModelMask.leading(k, p)
        # Separate root seed per cell, far from the law cells' seed offsets
        fitted = mc_fitted_deviations(
            n, k, dgp, mask, reps, seed + 10_000 + cell, max_workers
        )
        s2 = fitted.sigma2_m
        for mult in (0.5, 1.0):
            eps = mult * s2
            label = f"[n={n},k={k},eps={mult:g}s2]"
            a4 = deviation_bound_a4(n, k, s2, eps)
            a5 = sp_deviation_bound_a5(n, k, s2, eps)
            rho_tail = fitted.tail(StatisticKind.RHO_HAT_DEVIATION, eps)
            sp_tail = fitted.tail(StatisticKind.SP_DEVIATION, eps)
            checks.append(
                _dominance_check(f"fitted_rho_hat_deviation{label}", a4.total, rho_tail)
            )
            checks.append(
                _dominance_check(f"fitted_sp_deviation{label}", a5.total, sp_tail)
            )
    return checks


def _grid(start: float, stop: float, step: float) -> np.ndarray:
    """Inclusive grid start, start + step, ..., stop free of accumulated round-off"""
    count = int(round((stop - start) / step))
    return np.round(start + step * np.arange(count + 1), 10)


def suite_rate_inequalities(
    reps: int = 0, seed: int = 0, max_workers: Optional[int] = None
) -> List[CheckResult]:
    """Orderings between K and L on dense grids; reps and seed are unused"""
    r_grid = _grid(0.05, 10.0, 0.05)
    c_grid = _grid(0.0, 10.0, 0.01)
    unit_grid = c_grid[c_grid < 1.0]

    def count(violations: int, name: str, required: str) -> CheckResult:
        return _check(name, violations == 0, violations, required)

    k_sym = 0
    for r in r_grid:
        for c in c_grid[c_grid < r]:
            if rate_function_K(r, c) > rate_function_K(r, -c) + ANALYTIC_TOL:
                k_sym += 1
    l_sym = sum(
        1 for c in unit_grid if rate_function_L(c) > rate_function_L(-c) + ANALYTIC_TOL
    )

    k_vs_l = 0
    for r in r_grid:
        for c in c_grid:
            if rate_function_L(c / (r + 1 + c)) > rate_function_K(r, c) + ANALYTIC_TOL:
                k_vs_l += 1

    l_values = np.array([rate_function_L(c) for c in c_grid])
    l_monotone = int(np.count_nonzero(np.diff(l_values) < -ANALYTIC_TOL))
    l_quadratic = sum(
        1 for c in unit_grid if c * c / 4 > rate_function_L(c) + ANALYTIC_TOL
    )

    return [
        count(
            k_sym, "K_upper_below_lower", "0 points with K(r, c) > K(r, -c), 0 <= c < r"
        ),
        count(l_sym, "L_upper_below_lower", "0 points with L(c) > L(-c), 0 <= c < 1"),
        count(k_vs_l, "L_below_K", "0 points with L(c/(r+1+c)) > K(r, c)"),
        count(l_monotone, "L_increasing", "0 decreasing steps on [0, 10]"),
        count(
            l_quadratic, "L_above_quadratic", "0 points with c^2/4 > L(c), 0 <= c < 1"
        ),
    ]


def suite_robustness(
    reps: int, seed: int, max_workers: Optional[int] = None
) -> List[CheckResult]:
    """
    Desk-scale behaviour of GCV across regressor and error laws, plus the
    selection guarantees along the greedy block path
    """
    checks: List[CheckResult] = []
    medians: Dict[str, float] = {}
    bias_violations = 0

    for x_dist in DistributionKind:
        for u_dist in DistributionKind:
            config = ScenarioConfig(
                scenario_id=1,
                scale=Scale.DESK,
                seed=seed,
                x_dist=x_dist,
                u_dist=u_dist,
            )
            ratios = []
            for r in range(reps):
                result = run_scenario_experiment(config, r, max_workers)
                ratios.append(result.gap_ratio)
                if x_dist == u_dist == DistributionKind.NORMAL:
                    bias_violations += sum(
                        1
                        for row in result.rows
                        if row.order >= 2
                        and not (
                            row.gray_aic < row.rho2
                            and row.gray_fpe < row.rho2
                            and (row.gray_aicc is None or row.gray_aicc > row.rho2)
                            and row.gray_bic > row.rho2
                        )
                    )
            medians[f"{x_dist.value}/{u_dist.value}"] = float(np.median(ratios))

    gaussian = medians["normal/normal"]
    spread = max(medians.values()) / min(medians.values())
    detail = ", ".join(f"{key}={value:.4f}" for key, value in medians.items())
    checks.append(
        _check("gcv_gap_gaussian", gaussian < 0.15, gaussian, "median < 0.15")
    )
    checks.append(
        _check(
            "gcv_gap_spread", spread < 2.0, spread, "max/min median < 2", detail=detail
        )
    )
    checks.append(
        _check(
            "gray_curve_bias_direction",
            bias_violations == 0,
            bias_violations,
            "0 violations for k >= 2",
        )
    )

    block_config = ScenarioConfig(scenario_id=2, scale=Scale.DESK, seed=seed)
    regrets, estimate_gaps, floors = [], [], []
    for r in range(reps):
        result = run_scenario_experiment(block_config, r, max_workers)
        regrets.append(result.regret)
        floors.append(result.sigma2_full)
        selected = result.selected
        estimate_gaps.append(abs(selected.gcv - selected.rho2) / result.max_rho2)
    regret = float(np.median(regrets))
    regret_limit = 0.1 * float(np.median(floors))
    estimate_gap = float(np.median(estimate_gaps))
    checks.append(
        _check(
            "gcv_selection_regret",
            regret < regret_limit,
            regret,
            f"median < {regret_limit:.4g}",
        )
    )
    checks.append(
        _check(
            "gcv_selected_estimate",
            estimate_gap < 0.1,
            estimate_gap,
            "median / max rho2 < 0.1",
        )
    )
    return checks


@dataclass(frozen=True)
class Suite:
    run: Callable[[int, int, Optional[int]], List[CheckResult]]
    default_reps: int
    default_seed: int


SUITES: Dict[str, Suite] = {
    "prop31": Suite(suite_prop31, 20_000, 1),
    "dominance": Suite(suite_dominance, 100_000, 2),
    "lemmaA3": Suite(suite_rate_inequalities, 0, 0),
    "robustness": Suite(suite_robustness, 20, 0),
}


def run_suite(
    name: str,
    reps: Optional[int] = None,
    seed: Optional[int] = None,
    max_workers: Optional[int] = None,
) -> VerifyReport:
    """
    Run a named verification suite

    Returns:
        VerifyReport with one CheckResult per check; success is True only if
        all pass. Runtime failures inside a suite are reported in its error
        field.

    Raises:
        DomainError: when reps or seed are outside what the suite accepts
    """
    suite = SUITES[name]
    reps = suite.default_reps if reps is None else reps
    seed = suite.default_seed if seed is None else seed
    logger.info("Running verification suite %s (reps=%d, seed=%d)", name, reps, seed)
    try:
        checks = suite.run(reps, seed, max_workers)
    except DomainError:
        raise
    except MspeLabError as e:
        logger.error("Suite %s aborted: %s", name, e)
        return VerifyReport(suite=name, success=False, error=str(e))

    failed = [c.name for c in checks if not c.passed]
    if failed:
        logger.warning(
            "Suite %s: %d of %d checks failed: %s",
            name,
            len(failed),
            len(checks),
            ", ".join(failed[:10]),
        )
    return VerifyReport(suite=name, success=not failed, checks=checks)
