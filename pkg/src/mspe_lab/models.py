"""
Pydantic models implementation for mspe-lab
"""

from enum import Enum
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


# Enumerations
class DistributionKind(str, Enum):
    """Standardized (mean 0, variance 1) laws for regressors and errors"""

    NORMAL = "normal"
    EXPONENTIAL_CENTERED = "exponential"
    BERNOULLI_CENTERED = "bernoulli"


class CriterionKind(str, Enum):
    """Model selection objective functions"""

    GCV = "gcv"
    SP = "sp"
    RHO_HAT2 = "rho_hat2"
    AIC = "aic"
    AICC = "aicc"
    FPE = "fpe"
    BIC = "bic"


class TailSide(str, Enum):
    """Which tail a deviation bound or probability refers to"""

    UPPER = "upper"
    LOWER = "lower"


class Scale(str, Enum):
    """Problem size of a scenario run"""

    PAPER = "paper"
    DESK = "desk"


class StatisticKind(str, Enum):
    """Statistics whose tail probabilities the Monte Carlo oracle estimates"""

    RATIO = "ratio"
    CHISQ = "chisq"
    RHO_HAT_DEVIATION = "rho_hat_deviation"
    SP_DEVIATION = "sp_deviation"


# Candidate models
class ModelMask(BaseModel):
    """A candidate submodel identified by the indices of its included regressors"""

    model_config = ConfigDict(frozen=True)

    included: Tuple[int, ...] = Field(
        default=(), description="Included column indices (ascending)"
    )
    p: int = Field(ge=0, description="Total number of candidate regressors")

    @field_validator("included", mode="before")
    @classmethod
    def _normalize(cls, value: Any) -> Tuple[int, ...]:
        indices = [int(v) for v in value]
        if len(set(indices)) != len(indices):
            raise ValueError("mask indices must be distinct")
        return tuple(sorted(indices))

    @model_validator(mode="after")
    def _check_range(self) -> "ModelMask":
        if self.included and (self.included[0] < 0 or self.included[-1] >= self.p):
            raise ValueError(f"mask indices must lie in [0, {self.p})")
        return self

    @classmethod
    def leading(cls, k: int, p: int) -> "ModelMask":
        """The leading-term model {0, ..., k-1}"""
        return cls(included=tuple(range(k)), p=p)

    @property
    def order(self) -> int:
        return len(self.included)

    def without(self, indices: Tuple[int, ...]) -> "ModelMask":
        """Copy of the mask with the given indices removed"""
        dropped = set(indices)
        kept = tuple(j for j in self.included if j not in dropped)
        return ModelMask(included=kept, p=self.p)

    def sort_key(self) -> Tuple[int, Tuple[int, ...]]:
        """Smaller order first, then lexicographic index order"""
        return (self.order, self.included)

    def index_array(self) -> np.ndarray:
        return np.asarray(self.included, dtype=np.intp)


# Data-generating process
class DgpSpec(BaseModel):
    """Ground truth of the linear model y = x'beta + u over finitely many regressors"""

    beta: List[float] = Field(description="Regression coefficients beta_0..beta_{p-1}")
    sigma: float = Field(1.0, ge=0, description="Error standard deviation")
    sigma_mat: Union[Literal["identity"], List[List[float]]] = Field(
        "identity",
        description="Regressor covariance, 'identity' or a row-major p x p matrix",
    )
    x_dist: DistributionKind = Field(
        DistributionKind.NORMAL, description="Law of the regressors"
    )
    u_dist: DistributionKind = Field(
        DistributionKind.NORMAL, description="Law of the error"
    )

    @field_validator("beta")
    @classmethod
    def _check_beta(cls, value: List[float]) -> List[float]:
        if not value:
            raise ValueError("beta must contain at least one coefficient")
        if not np.all(np.isfinite(value)):
            raise ValueError("beta must be finite")
        return value

    @model_validator(mode="after")
    def _check_covariance(self) -> "DgpSpec":
        if self.sigma_mat == "identity":
            return self
        mat = np.asarray(self.sigma_mat, dtype=float)
        if mat.shape != (self.p, self.p):
            raise ValueError(f"sigma_mat must be {self.p} x {self.p}, got {mat.shape}")
        if not np.allclose(mat, mat.T):
            raise ValueError("sigma_mat must be symmetric")
        try:
            np.linalg.cholesky(mat)
        except np.linalg.LinAlgError:
            raise ValueError("sigma_mat must be positive definite")
        return self

    @property
    def p(self) -> int:
        return len(self.beta)

    @property
    def is_identity(self) -> bool:
        return self.sigma_mat == "identity"

    @property
    def is_gaussian(self) -> bool:
        return (
            self.x_dist == DistributionKind.NORMAL
            and self.u_dist == DistributionKind.NORMAL
        )

    def beta_array(self) -> np.ndarray:
        return np.asarray(self.beta, dtype=float)

    def covariance(self) -> np.ndarray:
        if self.is_identity:
            return np.eye(self.p)
        return np.asarray(self.sigma_mat, dtype=float)

    def quadratic_form(self, d: np.ndarray) -> float:
        """d' Sigma d, using the identity fast path when available"""
        if self.is_identity:
            return float(d @ d)
        return float(d @ self.covariance() @ d)

    @property
    def var_y(self) -> float:
        """Var[y] = sigma^2 + beta' Sigma beta"""
        return self.sigma**2 + self.quadratic_form(self.beta_array())


# Per-model records
class CriterionRecord(BaseModel):
    """Criterion values of one fitted candidate model"""

    mask: ModelMask
    k: int = Field(ge=0, description="Model order |m|")
    rss: float = Field(ge=0, description="Residual sum of squares")
    values: Dict[CriterionKind, float] = Field(
        description="Criterion values (AICC absent when k >= n - 2)"
    )
    aicc_at_boundary: bool = Field(False, description="AICc evaluated at k = n - 3")


class OracleRecord(BaseModel):
    """True performance quantities of one fitted candidate model"""

    mask: ModelMask
    sigma2_m: float = Field(ge=0, description="Residual variance sigma^2(m)")
    rho2: float = Field(ge=0, description="Conditional MSPE of the fitted model")
    r2: float = Field(ge=0, description="Unconditional MSPE R^2(m)")
    var_rho2: Optional[float] = Field(
        None, description="Var[rho^2(m)], absent when |m| >= n - 3"
    )
    gaussian_formula: bool = Field(
        False,
        description="sigma2_m is the Gaussian formula applied to a non-Gaussian design",
    )


class ExperimentRow(BaseModel):
    """One row of a scenario result table"""

    model_id: int
    order: int
    rss: float
    gcv: float
    sp: float
    rho_hat2: float
    aic: float
    aicc: Optional[float] = None
    fpe: float
    bic: float
    sigma2_m: float
    rho2: float
    r2: float
    gray_aic: float
    gray_fpe: float
    gray_aicc: Optional[float] = None
    gray_bic: float


# Bounds
class BoundReport(BaseModel):
    """All analytic deviation bounds evaluated at one (n, k, sigma2_m, epsilon)"""

    n: int
    k: int
    sigma2_m: float = Field(ge=0)
    epsilon: float = Field(gt=0)
    thm32: float
    b1: float
    b2: float
    b3: float
    b4: float
    a4_sum: float
    c1: float
    c2: float
    a5_sum: float
    a5_psi_form: float
    cor33: Optional[float] = Field(
        None, description="Uniform bound when a family size and c are given"
    )
    rate_a_n: Optional[float] = Field(
        None, description="Rate a_n when a family size is given"
    )


# Configuration of experiments
SCALE_DEFAULTS: Dict[Tuple[Scale, int], Dict[str, Optional[int]]] = {
    (Scale.PAPER, 1): {"n": 700, "p": 600, "block_size": None},
    (Scale.PAPER, 2): {"n": 1300, "p": 1000, "block_size": 50},
    (Scale.PAPER, 3): {"n": 1300, "p": 1000, "block_size": 50},
    (Scale.DESK, 1): {"n": 200, "p": 170, "block_size": None},
    (Scale.DESK, 2): {"n": 260, "p": 200, "block_size": 20},
    (Scale.DESK, 3): {"n": 260, "p": 200, "block_size": 20},
}


class ScenarioConfig(BaseModel):
    """Parameters of one simulation scenario run"""

    scenario_id: Literal[1, 2, 3] = Field(description="Scenario number")
    scale: Scale = Field(Scale.DESK, description="Problem size")
    n: Optional[int] = Field(None, ge=3, description="Sample size")
    p: Optional[int] = Field(None, ge=1, description="Number of candidate regressors")
    block_size: Optional[int] = Field(
        None, ge=1, description="Block length (scenarios 2 and 3)"
    )
    snr_target: float = Field(
        5.0, gt=0, description="Signal-to-noise ratio (Var[y] - sigma^2)^(1/2) / sigma"
    )
    x_dist: DistributionKind = Field(
        DistributionKind.NORMAL, description="Law of the regressors"
    )
    u_dist: DistributionKind = Field(
        DistributionKind.NORMAL, description="Law of the error"
    )
    seed: int = Field(0, ge=0, lt=2**64, description="Root seed of all randomness")
    replications: int = Field(
        1, ge=1, description="Number of realizations (diagnostic mode when > 1)"
    )

    @model_validator(mode="before")
    @classmethod
    def _fill_scale_defaults(cls, data: Any) -> Any:
        if not isinstance(data, dict) or "scenario_id" not in data:
            return data
        scale = Scale(data.get("scale") or Scale.DESK)
        defaults = SCALE_DEFAULTS.get((scale, int(data["scenario_id"])), {})
        filled = dict(data)
        for key, value in defaults.items():
            if filled.get(key) is None:
                filled[key] = value
            elif scale == Scale.PAPER and filled[key] != value:
                raise ValueError(f"paper scale fixes {key}={value}")
        return filled

    @model_validator(mode="after")
    def _check_sizes(self) -> "ScenarioConfig":
        assert self.n is not None and self.p is not None
        if self.p >= self.n - 1:
            raise ValueError(f"p={self.p} must be < n - 1 = {self.n - 1}")
        if self.scenario_id in (2, 3):
            if self.block_size is None or self.p % self.block_size != 0:
                raise ValueError("block_size must divide p for block scenarios")
        return self

    @property
    def n_blocks(self) -> int:
        if self.block_size is None or self.p is None:
            return 0
        return self.p // self.block_size


# Monte Carlo oracle
class StatisticSpec(BaseModel):
    """A statistic with a known law, sampled by the Monte Carlo tail oracle"""

    kind: StatisticKind
    a: Optional[int] = Field(
        None, ge=1, description="Numerator degrees of freedom (ratio)"
    )
    b: Optional[int] = Field(
        None, ge=1, description="Denominator degrees of freedom (ratio, chisq)"
    )
    n: Optional[int] = Field(
        None, ge=3, description="Sample size (deviation statistics)"
    )
    k: Optional[int] = Field(
        None, ge=0, description="Model order (deviation statistics)"
    )
    sigma2_m: float = Field(
        1.0, gt=0, description="Residual variance (deviation statistics)"
    )
    side: TailSide = Field(TailSide.UPPER, description="Tail of the signed statistics")

    @model_validator(mode="after")
    def _check_parameters(self) -> "StatisticSpec":
        if self.kind == StatisticKind.RATIO and (self.a is None or self.b is None):
            raise ValueError("ratio statistic needs a and b")
        if self.kind == StatisticKind.CHISQ and self.b is None:
            raise ValueError("chisq statistic needs b")
        if self.kind in (StatisticKind.RHO_HAT_DEVIATION, StatisticKind.SP_DEVIATION):
            if self.n is None or self.k is None:
                raise ValueError("deviation statistics need n and k")
            if self.k >= self.n - 1:
                raise ValueError("deviation statistics need k < n - 1")
        return self


class TailEstimate(BaseModel):
    """Empirical exceedance frequency with its binomial standard error"""

    threshold: float
    estimate: float = Field(ge=0, le=1)
    std_error: float = Field(ge=0)
    reps: int


class Prop31Report(BaseModel):
    """Monte Carlo check of the finite-sample laws of rho^2(m) and RSS(m)"""

    n: int
    k: int
    reps: int
    seed: int
    sigma2_m: float
    r2: float
    mean_rho2: float
    mean_rho2_se: float
    var_rho2_empirical: float
    var_rho2_exact: Optional[float] = None
    var_rho2_approx: Optional[float] = None
    ks_distance: Optional[float] = None
    rss_mean: float = Field(description="Mean of RSS / sigma^2(m)")
    rss_mean_se: float
    rss_var: float = Field(description="Variance of RSS / sigma^2(m)")
    rss_df: int
    sp_mean: float
    sp_se: float


# Verification and run bookkeeping
class CheckResult(BaseModel):
    """Outcome of a single verification check"""

    name: str = Field(description="Check identifier")
    passed: bool
    observed: Optional[float] = Field(None, description="Observed value")
    required: str = Field(description="Requirement the observed value is held to")
    detail: Optional[str] = None


class VerifyReport(BaseModel):
    """Response model for a verification suite"""

    suite: str
    success: bool = Field(description="Indicates if every check passed")
    checks: List[CheckResult] = Field(default_factory=list)
    error: Optional[str] = Field(default=None, description="Error message, if any")


class RunManifest(BaseModel):
    """Record written next to the artifacts of every command run"""

    command: str
    config: Dict[str, Any] = Field(default_factory=dict)
    seed: Optional[int] = None
    artifacts: List[str] = Field(default_factory=list)
    wall_time_s: float = 0.0
    tool_version: str
