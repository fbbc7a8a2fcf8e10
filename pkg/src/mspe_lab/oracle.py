"""
Ground-truth performance quantities of candidate models under a known DGP
"""

import logging
from typing import Optional

import numpy as np
import scipy.linalg

from .errors import OrderTooLargeError, SingularSubmatrixError
from .models import DgpSpec, ModelMask, OracleRecord
from .regression import Dataset, FitResult

logger = logging.getLogger(__name__)


def conditional_residual_variance(dgp: DgpSpec, m: ModelMask) -> float:
    """
    Residual variance sigma^2(m) of y given the regressors in m

    Uses the Gaussian conditional-variance identity
    sigma^2 + b'Sb - c_m' S_mm^{-1} c_m with c_m = S_{m.} b. Under a
    non-Gaussian design this is the linear-projection residual variance.

    Raises:
        SingularSubmatrixError: when S_mm is not positive definite
    """
    if m.p != dgp.p:
        raise ValueError(f"Mask is defined for p={m.p}, DGP has p={dgp.p}")

    beta = dgp.beta_array()
    noise = dgp.sigma**2
    if dgp.is_identity:
        omitted = np.ones(dgp.p, dtype=bool)
        omitted[m.index_array()] = False
        return noise + float(beta[omitted] @ beta[omitted])

    if m.order == 0:
        return dgp.var_y

    cov = dgp.covariance()
    idx = m.index_array()
    c_m = cov[idx, :] @ beta
    try:
        factor = scipy.linalg.cho_factor(cov[np.ix_(idx, idx)])
    except np.linalg.LinAlgError as e:
        raise SingularSubmatrixError(
            f"Covariance submatrix on mask of order {m.order} is singular: {e}"
        )
    explained = float(c_m @ scipy.linalg.cho_solve(factor, c_m))
    # Round-off may push the residual below the noise floor
    return max(noise, dgp.var_y - explained)


def conditional_mspe(dgp: DgpSpec, beta_hat: np.ndarray) -> float:
    """rho^2 = sigma^2 + d' S d with d = beta - beta_hat"""
    beta_hat = np.asarray(beta_hat, dtype=float)
    if beta_hat.shape != (dgp.p,):
        raise ValueError(
            f"beta_hat must have length {dgp.p}, got shape {beta_hat.shape}"
        )
    d = dgp.beta_array() - beta_hat
    return dgp.sigma**2 + dgp.quadratic_form(d)


def unconditional_mspe(sigma2_m: float, n: int, k: int) -> float:
    """R^2(m) = sigma^2(m) (n - 1) / (n - 1 - k)"""
    if k >= n - 1:
        raise OrderTooLargeError(k, n)
    return sigma2_m * (n - 1) / (n - 1 - k)


def mspe_variance(sigma2_m: float, n: int, k: int) -> float:
    """
    Exact variance of rho^2(m) for Gaussian data

    Raises:
        OrderTooLargeError: when k >= n - 3 (the variance is infinite)
    """
    if k >= n - 3:
        raise OrderTooLargeError(k, n, limit=n - 3)
    return 2 * sigma2_m**2 * k * (n - 1) / ((n - k - 1) ** 2 * (n - k - 3))


def mspe_variance_approx(sigma2_m: float, n: int, k: int) -> float:
    """Large-sample form (2/n) sigma^4(m) (k/n) / (1 - k/n)^3"""
    if k >= n:
        raise OrderTooLargeError(k, n, limit=n)
    r = k / n
    return (2 / n) * sigma2_m**2 * r / (1 - r) ** 3


def oracle_record(dgp: DgpSpec, fit: FitResult, n: int) -> OracleRecord:
    """True performance quantities of a fitted model"""
    k = fit.mask.order
    sigma2_m = conditional_residual_variance(dgp, fit.mask)
    var_rho2: Optional[float] = mspe_variance(sigma2_m, n, k) if k < n - 3 else None
    return OracleRecord(
        mask=fit.mask,
        sigma2_m=sigma2_m,
        rho2=conditional_mspe(dgp, fit.beta_hat),
        r2=unconditional_mspe(sigma2_m, n, k),
        var_rho2=var_rho2,
        gaussian_formula=not dgp.is_gaussian,
    )


def estimate_response_variance(data: Dataset) -> float:
    """Sample variance of Y about its mean (n - 1 denominator), a plug-in for Var[y]"""
    return float(np.var(data.Y, ddof=1))
