"""
Data-generating processes, the three simulation scenarios and Monte Carlo drivers

All randomness flows from one integer seed. Independent streams are derived
from it with SeedSequence spawn keys, so a replication's draws depend only on
(seed, replication) and never on worker scheduling.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import scipy.linalg
import scipy.stats

from .criteria import criterion_record, criterion_value, fit_family, gray_curve_value
from .errors import DistributionNotGaussianError, DomainError, OrderTooLargeError
from .models import (
    CriterionKind,
    CriterionRecord,
    DgpSpec,
    DistributionKind,
    ExperimentRow,
    ModelMask,
    OracleRecord,
    Prop31Report,
    ScenarioConfig,
    StatisticKind,
    StatisticSpec,
    TailEstimate,
    TailSide,
)
from .oracle import (
    conditional_mspe,
    conditional_residual_variance,
    mspe_variance,
    mspe_variance_approx,
    oracle_record,
    unconditional_mspe,
)
from .parallel import ordered_map
from .regression import Dataset, FitResult, fit_restricted_ls
from .search import (
    BlockPartition,
    GreedyPath,
    greedy_block_elimination,
    leading_term_family,
    select_best,
)

logger = logging.getLogger(__name__)

# Spawn keys of the independent streams under one root seed
BETA_STREAM = 0
DATA_STREAM = 1

ENVELOPE_LAG = 50
LARGE_BLOCKS = 3
LARGE_BLOCK_FACTOR = 10.0

MIN_TAIL_REPS = 10_000
TAIL_CHUNK = 1 << 18
FIT_CHUNK = 500

CSV_COLUMNS = list(ExperimentRow.model_fields)


def substream(seed: int, *keys: int) -> np.random.Generator:
    """Independent generator for the stream identified by keys under seed"""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=keys))


def draw_standardized(
    rng: np.random.Generator,
    kind: DistributionKind,
    size: Union[int, Tuple[int, ...]],
) -> np.ndarray:
    """Mean-zero, unit-variance draws of the given law"""
    if kind == DistributionKind.NORMAL:
        return rng.standard_normal(size)
    if kind == DistributionKind.EXPONENTIAL_CENTERED:
        return rng.exponential(1.0, size) - 1.0
    if kind == DistributionKind.BERNOULLI_CENTERED:
        return 2.0 * rng.integers(0, 2, size) - 1.0
    raise DomainError(f"Unknown distribution kind: {kind}")


def sample_design_and_response(dgp: DgpSpec, n: int, seed: int, *keys: int) -> Dataset:
    """
    Draw n i.i.d. rows (y, x) from the DGP

    Regressors are drawn first, then errors, from the stream (seed, *keys).
    A non-identity covariance is imposed through its Cholesky factor.
    """
    rng = substream(seed, *keys)
    X = draw_standardized(rng, dgp.x_dist, (n, dgp.p))
    if not dgp.is_identity:
        chol = scipy.linalg.cholesky(dgp.covariance(), lower=True)
        X = X @ chol.T
    u = dgp.sigma * draw_standardized(rng, dgp.u_dist, n)
    return Dataset(X=X, Y=X @ dgp.beta_array() + u)


def _random_signs(rng: np.random.Generator, size: int) -> np.ndarray:
    return 2.0 * rng.integers(0, 2, size) - 1.0


def scenario_parameters(config: ScenarioConfig) -> DgpSpec:
    """
    Coefficients of a scenario, rescaled so that ||beta|| / sigma = snr_target

    1: approximately decreasing magnitudes j^-0.6 (1 + 0.3 e_j), capped so
       that |beta_j| <= |beta_{j-50}|
    2: a few large blocks of adjacent coefficients among many small ones
    3: magnitudes uniform on [0.5, 1.5] with random signs, not sparse
    """
    assert config.p is not None
    rng = substream(config.seed, BETA_STREAM)
    p = config.p
    sigma = 1.0

    if config.scenario_id == 1:
        j = np.arange(1, p + 1, dtype=float)
        beta = j**-0.6 * (1 + 0.3 * rng.uniform(-1.0, 1.0, p))
        for r in range(min(ENVELOPE_LAG, p)):
            beta[r::ENVELOPE_LAG] = np.minimum.accumulate(beta[r::ENVELOPE_LAG])
    else:
        beta = rng.uniform(0.5, 1.5, p) * _random_signs(rng, p)
        if config.scenario_id == 2:
            assert config.block_size is not None
            size = config.block_size
            n_large = min(LARGE_BLOCKS, config.n_blocks)
            for b in rng.choice(config.n_blocks, size=n_large, replace=False):
                beta[b * size : (b + 1) * size] *= LARGE_BLOCK_FACTOR

    beta *= config.snr_target * sigma / np.linalg.norm(beta)
    return DgpSpec(
        beta=beta.tolist(),
        sigma=sigma,
        sigma_mat="identity",
        x_dist=config.x_dist,
        u_dist=config.u_dist,
    )


@dataclass(frozen=True)
class InfeasibleBenchmark:
    """Best rho^2 along the leading-term family of the |beta|-sorted design"""

    order: int
    rho2: float


def infeasible_benchmark(data: Dataset, dgp: DgpSpec) -> InfeasibleBenchmark:
    """
    Reference performance of a selector that knows the ordering of |beta_j|

    The columns are reordered by decreasing |beta_j| (stable) and the nested
    fits of orders 0..min(p, n - 2) are read off one QR factorization.
    """
    ranking = np.argsort(-np.abs(dgp.beta_array()), kind="stable")
    k_max = min(data.p, data.n - 2)
    cols = ranking[:k_max]
    q, r = scipy.linalg.qr(data.X[:, cols], mode="economic")
    qty = q.T @ data.Y

    best = InfeasibleBenchmark(order=0, rho2=conditional_mspe(dgp, np.zeros(dgp.p)))
    for k in range(1, k_max + 1):
        beta_hat = np.zeros(dgp.p)
        beta_hat[cols[:k]] = scipy.linalg.solve_triangular(r[:k, :k], qty[:k])
        rho2 = conditional_mspe(dgp, beta_hat)
        if rho2 < best.rho2:
            best = InfeasibleBenchmark(order=k, rho2=rho2)
    return best


@dataclass
class ExperimentResult:
    """Per-model criteria and oracle quantities for one realization of a scenario"""

    config: ScenarioConfig
    dgp: DgpSpec
    replication: int
    masks: List[ModelMask]
    rows: List[ExperimentRow]
    argmins: Dict[str, int]
    path: Optional[GreedyPath] = None
    benchmark: Optional[InfeasibleBenchmark] = None
    wall_time_s: float = 0.0

    @property
    def sup_gcv_gap(self) -> float:
        return max(abs(row.gcv - row.rho2) for row in self.rows)

    @property
    def max_rho2(self) -> float:
        return max(row.rho2 for row in self.rows)

    @property
    def gap_ratio(self) -> float:
        """sup_m |GCV(m) - rho^2(m)| / max_m rho^2(m)"""
        return self.sup_gcv_gap / self.max_rho2

    @property
    def selected(self) -> ExperimentRow:
        """Row of the GCV-selected model"""
        return self.rows[self.argmins[CriterionKind.GCV.value]]

    @property
    def regret(self) -> float:
        """rho^2 of the GCV selection minus the best rho^2 in the family"""
        return self.selected.rho2 - self.rows[self.argmins["rho2"]].rho2

    @property
    def sigma2_full(self) -> float:
        """sigma^2(m) of the largest model in the family"""
        return max(self.rows, key=lambda row: row.order).sigma2_m

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(
            [row.model_dump() for row in self.rows], columns=CSV_COLUMNS
        )
        for column in ("aicc", "gray_aicc"):
            frame[column] = frame[column].astype(float)
        return frame


def _experiment_row(
    model_id: int, record: CriterionRecord, oracle: OracleRecord, n: int
) -> ExperimentRow:
    k = record.k
    values = record.values
    aicc = values.get(CriterionKind.AICC)
    rho2 = oracle.rho2
    gray_aicc = (
        None if aicc is None else gray_curve_value(CriterionKind.AICC, rho2, n, k)
    )
    return ExperimentRow(
        model_id=model_id,
        order=k,
        rss=record.rss,
        gcv=values[CriterionKind.GCV],
        sp=values[CriterionKind.SP],
        rho_hat2=values[CriterionKind.RHO_HAT2],
        aic=values[CriterionKind.AIC],
        aicc=aicc,
        fpe=values[CriterionKind.FPE],
        bic=values[CriterionKind.BIC],
        sigma2_m=oracle.sigma2_m,
        rho2=rho2,
        r2=oracle.r2,
        gray_aic=gray_curve_value(CriterionKind.AIC, rho2, n, k),
        gray_fpe=gray_curve_value(CriterionKind.FPE, rho2, n, k),
        gray_aicc=gray_aicc,
        gray_bic=gray_curve_value(CriterionKind.BIC, rho2, n, k),
    )


def _argmins(
    records: Sequence[CriterionRecord], oracles: Sequence[OracleRecord]
) -> Dict[str, int]:
    position = {record.mask: i for i, record in enumerate(records)}
    argmins: Dict[str, int] = {}
    for kind in CriterionKind:
        available = [r for r in records if kind in r.values]
        if available:
            argmins[kind.value] = position[select_best(available, kind)]
    argmins["rho2"] = min(
        range(len(oracles)),
        key=lambda i: (oracles[i].rho2, oracles[i].mask.sort_key()),
    )
    return argmins


def run_scenario_experiment(
    config: ScenarioConfig, replication: int = 0, max_workers: Optional[int] = None
) -> ExperimentResult:
    """
    One realization of a scenario: family, criteria, gray curves and oracle values

    Scenario 1 evaluates the leading-term family of orders 0..p; scenarios 2
    and 3 evaluate the greedy block path. Models are listed by increasing
    order in both cases.
    """
    assert config.n is not None and config.p is not None
    started = time.perf_counter()
    dgp = scenario_parameters(config)
    n = config.n
    data = sample_design_and_response(dgp, n, config.seed, DATA_STREAM, replication)

    path: Optional[GreedyPath] = None
    benchmark: Optional[InfeasibleBenchmark] = None
    if config.scenario_id == 1:
        family = leading_term_family(config.p)
    else:
        assert config.block_size is not None
        partition = BlockPartition.consecutive(config.p, config.block_size)
        path = greedy_block_elimination(data, partition, max_workers)
        family = path.increasing()
        benchmark = infeasible_benchmark(data, dgp)

    if not dgp.is_gaussian:
        logger.warning(
            "sigma2_m is the Gaussian-formula value for x_dist=%s, u_dist=%s",
            dgp.x_dist.value,
            dgp.u_dist.value,
        )

    fits = fit_family(data, family, max_workers)

    def evaluate(fit: FitResult) -> Tuple[CriterionRecord, OracleRecord]:
        return criterion_record(fit, n), oracle_record(dgp, fit, n)

    evaluated = ordered_map(evaluate, fits, max_workers)
    records = [e[0] for e in evaluated]
    oracles = [e[1] for e in evaluated]
    rows = [_experiment_row(i, rec, orc, n) for i, (rec, orc) in enumerate(evaluated)]

    result = ExperimentResult(
        config=config,
        dgp=dgp,
        replication=replication,
        masks=list(family),
        rows=rows,
        argmins=_argmins(records, oracles),
        path=path,
        benchmark=benchmark,
        wall_time_s=time.perf_counter() - started,
    )
    logger.info(
        "Scenario %d (replication %d): %d models, sup|GCV - rho2| / max rho2 = %.4f",
        config.scenario_id,
        replication,
        len(rows),
        result.gap_ratio,
    )
    return result


@dataclass
class SeedDispersion:
    """Per-replication selection diagnostics of a scenario"""

    config: ScenarioConfig
    frame: pd.DataFrame = field(repr=False)

    def summary(self) -> pd.DataFrame:
        metrics = self.frame.drop(columns=["replication"])
        return metrics.agg(["median", "min", "max"])


def run_seed_dispersion(
    config: ScenarioConfig,
    replications: Optional[int] = None,
    max_workers: Optional[int] = None,
) -> SeedDispersion:
    """
    Repeat a scenario over replications 0..R-1 with the same coefficients

    Records, per replication, the GCV-versus-rho^2 gap ratio, the regret of
    the GCV selection, and how well GCV estimates the selected model's rho^2.
    """
    count = config.replications if replications is None else replications
    rows = []
    for r in range(count):
        result = run_scenario_experiment(config, r, max_workers)
        selected = result.selected
        rows.append(
            {
                "replication": r,
                "gap_ratio": result.gap_ratio,
                "regret": result.regret,
                "selected_gap": abs(selected.gcv - selected.rho2),
                "selected_order": selected.order,
                "max_rho2": result.max_rho2,
                "sigma2_full": result.sigma2_full,
            }
        )
    return SeedDispersion(config=config, frame=pd.DataFrame(rows))


def _check_fitted_setup(n: int, k: int, dgp: DgpSpec, mask: ModelMask) -> None:
    if not dgp.is_gaussian:
        raise DistributionNotGaussianError(
            "Distributional checks require normal regressors and errors"
        )
    if mask.order != k:
        raise DomainError(f"Mask has order {mask.order}, expected k={k}")
    if k >= n - 1:
        raise OrderTooLargeError(k, n)


def _fitted_draws(
    n: int,
    dgp: DgpSpec,
    mask: ModelMask,
    reps: int,
    seed: int,
    max_workers: Optional[int],
) -> Tuple[np.ndarray, np.ndarray]:
    """rho^2 and RSS of the mask over reps fresh samples; sample i uses (seed, i)"""

    def run_chunk(start: int) -> np.ndarray:
        out = np.empty((min(FIT_CHUNK, reps - start), 2))
        for i in range(out.shape[0]):
            data = sample_design_and_response(dgp, n, seed, start + i)
            fit = fit_restricted_ls(data, mask)
            out[i] = conditional_mspe(dgp, fit.beta_hat), fit.rss
        return out

    starts = list(range(0, reps, FIT_CHUNK))
    draws = np.vstack(ordered_map(run_chunk, starts, max_workers))
    return draws[:, 0], draws[:, 1]


def mc_verify_prop31(
    n: int,
    k: int,
    dgp: DgpSpec,
    mask: ModelMask,
    reps: int,
    seed: int,
    max_workers: Optional[int] = None,
) -> Prop31Report:
    """
    Monte Carlo check of the finite-sample laws of rho^2(m), RSS(m) and S_p(m)

    Each replication draws a fresh Gaussian sample, fits the mask and records
    rho^2 and RSS. The rescaled rho^2 is compared with its F law by the
    Kolmogorov-Smirnov distance.

    Raises:
        DistributionNotGaussianError: when either law of the DGP is not normal
    """
    _check_fitted_setup(n, k, dgp, mask)
    if reps < 2:
        raise DomainError(f"reps must be >= 2, got {reps}")

    rho2, rss = _fitted_draws(n, dgp, mask, reps, seed, max_workers)
    sigma2_m = conditional_residual_variance(dgp, mask)
    sp = np.array([criterion_value(CriterionKind.SP, v, n, k) for v in rss])
    scaled_rss = rss / sigma2_m if sigma2_m > 0 else np.zeros_like(rss)

    ks_distance: Optional[float] = None
    if k > 0 and sigma2_m > 0:
        z = (rho2 / sigma2_m - 1) * (n - k + 1) / k
        law = scipy.stats.f(k, n - k + 1)
        ks_distance = float(scipy.stats.kstest(z, law.cdf).statistic)

    return Prop31Report(
        n=n,
        k=k,
        reps=reps,
        seed=seed,
        sigma2_m=sigma2_m,
        r2=unconditional_mspe(sigma2_m, n, k),
        mean_rho2=float(rho2.mean()),
        mean_rho2_se=float(rho2.std(ddof=1) / math.sqrt(reps)),
        var_rho2_empirical=float(rho2.var(ddof=1)),
        var_rho2_exact=mspe_variance(sigma2_m, n, k) if k < n - 3 else None,
        var_rho2_approx=mspe_variance_approx(sigma2_m, n, k),
        ks_distance=ks_distance,
        rss_mean=float(scaled_rss.mean()),
        rss_mean_se=float(scaled_rss.std(ddof=1) / math.sqrt(reps)),
        rss_var=float(scaled_rss.var(ddof=1)),
        rss_df=n - k,
        sp_mean=float(sp.mean()),
        sp_se=float(sp.std(ddof=1) / math.sqrt(reps)),
    )


def _tail_estimate(hits: int, reps: int, threshold: float) -> TailEstimate:
    estimate = hits / reps
    return TailEstimate(
        threshold=threshold,
        estimate=estimate,
        std_error=math.sqrt(estimate * (1 - estimate) / reps),
        reps=reps,
    )


@dataclass
class FittedDeviations:
    """Absolute estimation errors of rho_hat^2 and S_p over fitted replications"""

    n: int
    k: int
    sigma2_m: float
    rho_hat_gap: np.ndarray = field(repr=False)
    sp_gap: np.ndarray = field(repr=False)

    def tail(self, kind: StatisticKind, threshold: float) -> TailEstimate:
        """Frequency of |deviation| > threshold for a deviation statistic"""
        if kind == StatisticKind.RHO_HAT_DEVIATION:
            gaps = self.rho_hat_gap
        elif kind == StatisticKind.SP_DEVIATION:
            gaps = self.sp_gap
        else:
            raise DomainError(f"{kind.value} is not a deviation statistic")
        hits = int(np.count_nonzero(gaps > threshold))
        return _tail_estimate(hits, gaps.size, threshold)


def mc_fitted_deviations(
    n: int,
    k: int,
    dgp: DgpSpec,
    mask: ModelMask,
    reps: int,
    seed: int,
    max_workers: Optional[int] = None,
) -> FittedDeviations:
    """
    |rho_hat^2 - rho^2| and |S_p - R^2| from actual fits of the mask

    Unlike mc_tail_probability, every replication goes through the least
    squares fit and the oracle, so tail frequencies computed here test the
    estimation code itself.
    """
    _check_fitted_setup(n, k, dgp, mask)
    if reps < 2:
        raise DomainError(f"reps must be >= 2, got {reps}")

    rho2, rss = _fitted_draws(n, dgp, mask, reps, seed, max_workers)
    sigma2_m = conditional_residual_variance(dgp, mask)
    r2 = unconditional_mspe(sigma2_m, n, k)
    rho_hat2 = np.array([criterion_value(CriterionKind.RHO_HAT2, v, n, k) for v in rss])
    sp = np.array([criterion_value(CriterionKind.SP, v, n, k) for v in rss])
    return FittedDeviations(
        n=n,
        k=k,
        sigma2_m=sigma2_m,
        rho_hat_gap=np.abs(rho_hat2 - rho2),
        sp_gap=np.abs(sp - r2),
    )


def _chisq(rng: np.random.Generator, df: int, size: int) -> np.ndarray:
    if df == 0:
        return np.zeros(size)
    return rng.chisquare(df, size)


def _sample_statistic(
    spec: StatisticSpec, rng: np.random.Generator, size: int
) -> np.ndarray:
    if spec.kind == StatisticKind.RATIO:
        assert spec.a is not None and spec.b is not None
        ratio = _chisq(rng, spec.a, size) / _chisq(rng, spec.b, size)
        return ratio - spec.a / spec.b
    if spec.kind == StatisticKind.CHISQ:
        assert spec.b is not None
        return _chisq(rng, spec.b, size) / spec.b - 1

    assert spec.n is not None and spec.k is not None
    n, k, s2 = spec.n, spec.k, spec.sigma2_m
    # Gaussian case: rho^2 and RSS are independent
    if spec.kind == StatisticKind.RHO_HAT_DEVIATION:
        rho2 = s2 * (1 + _chisq(rng, k, size) / _chisq(rng, n - k + 1, size))
        scale = s2 / (n - k) * (n + 1) / (n + 1 - k)
        rho_hat2 = scale * _chisq(rng, n - k, size)
        return np.abs(rho_hat2 - rho2)
    r2 = s2 * (n - 1) / (n - 1 - k)
    return np.abs(r2 * (_chisq(rng, n - k, size) / (n - k) - 1))


def mc_tail_probability(
    spec: StatisticSpec, threshold: float, reps: int, seed: int
) -> TailEstimate:
    """
    Empirical exceedance frequency of a statistic with binomial standard error

    Signed statistics (ratio, chisq) count S > threshold on the upper side and
    S < -threshold on the lower side; deviation statistics are absolute values
    and count |D| > threshold.
    """
    if reps < MIN_TAIL_REPS:
        raise DomainError(f"reps must be >= {MIN_TAIL_REPS}, got {reps}")
    rng = substream(seed)
    signed = spec.kind in (StatisticKind.RATIO, StatisticKind.CHISQ)
    lower = signed and spec.side == TailSide.LOWER

    hits = 0
    done = 0
    while done < reps:
        size = min(TAIL_CHUNK, reps - done)
        values = _sample_statistic(spec, rng, size)
        exceeded = values < -threshold if lower else values > threshold
        hits += int(np.count_nonzero(exceeded))
        done += size

    return _tail_estimate(hits, reps, threshold)
