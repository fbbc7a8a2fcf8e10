"""
Restricted least-squares fitting for submodels of a finite design
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Tuple, Union

import numpy as np
import pandas as pd
import scipy.linalg

from .errors import ConfigError, OrderTooLargeError, RankDeficientError
from .models import ModelMask

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Dataset:
    """A sample (Y, X): n x p design matrix and response n-vector"""

    X: np.ndarray
    Y: np.ndarray

    def __post_init__(self) -> None:
        X = np.asarray(self.X, dtype=float)
        Y = np.asarray(self.Y, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.ndim != 2 or Y.ndim != 1 or X.shape[0] != Y.shape[0]:
            raise ValueError(f"Incompatible shapes: X {X.shape}, Y {Y.shape}")
        if X.shape[0] < 3:
            raise ValueError(f"Sample size must be at least 3, got {X.shape[0]}")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
            raise ValueError("Dataset contains non-finite entries")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)

    @property
    def n(self) -> int:
        return int(self.X.shape[0])

    @property
    def p(self) -> int:
        return int(self.X.shape[1])


@dataclass(frozen=True)
class FitResult:
    """Restricted least-squares fit of one candidate model"""

    mask: ModelMask
    beta_hat: np.ndarray = field(repr=False)
    rss: float


def project_onto_columns(X_m: np.ndarray, Y: np.ndarray) -> Tuple[np.ndarray, float]:
    """
    Least-squares projection of Y onto the columns of X_m via pivoted QR

    Args:
        X_m: n x k matrix of selected columns (k may be 0)
        Y: response n-vector

    Returns:
        Tuple of (coefficients in the column order of X_m, residual sum of squares)

    Raises:
        RankDeficientError: when the columns are numerically collinear
    """
    k = X_m.shape[1]
    if k == 0:
        return np.zeros(0), float(Y @ Y)

    q, r, piv = scipy.linalg.qr(X_m, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    tol = np.finfo(float).eps * max(X_m.shape) * (diag[0] if diag.size else 0.0)
    rank = int(np.count_nonzero(diag > tol))
    if rank < k:
        raise RankDeficientError(rank=rank, order=k)

    coef = np.empty(k)
    coef[piv] = scipy.linalg.solve_triangular(r, q.T @ Y)
    resid = Y - X_m @ coef
    return coef, float(resid @ resid)


def fit_restricted_ls(data: Dataset, m: ModelMask) -> FitResult:
    """
    Fit the restricted least-squares estimator of model m

    Coefficients outside the mask are zero; the remaining ones come from
    regressing Y on the selected columns of X.

    Raises:
        OrderTooLargeError: when |m| >= n - 1
        RankDeficientError: when the selected columns are collinear
    """
    if m.p != data.p:
        raise ValueError(f"Mask is defined for p={m.p}, dataset has p={data.p}")
    if m.order >= data.n - 1:
        raise OrderTooLargeError(m.order, data.n)

    idx = m.index_array()
    try:
        coef, rss = project_onto_columns(data.X[:, idx], data.Y)
    except RankDeficientError as e:
        raise RankDeficientError(rank=e.rank, order=e.order, mask=m)

    beta_hat = np.zeros(data.p)
    beta_hat[idx] = coef
    logger.debug("Fitted model of order %d: rss=%.6g", m.order, rss)
    return FitResult(mask=m, beta_hat=beta_hat, rss=rss)


def load_dataset_csv(path: Union[str, Path]) -> Dataset:
    """
    Read a dataset with header `y,x0,...,x{p-1}`

    Raises:
        ConfigError: when the file is missing or malformed
    """
    try:
        frame = pd.read_csv(path, float_precision="round_trip")
    except FileNotFoundError:
        raise ConfigError(f"Dataset file not found: {path}")
    except (OSError, ValueError, pd.errors.ParserError) as e:
        raise ConfigError(f"Cannot read dataset {path}: {e}")

    expected = ["y"] + [f"x{j}" for j in range(frame.shape[1] - 1)]
    if list(frame.columns) != expected or frame.shape[1] < 2:
        raise ConfigError(
            f"Dataset {path} must have header y,x0,...,x{{p-1}}; "
            f"got {list(frame.columns)}"
        )
    try:
        values = frame.to_numpy(dtype=float)
        return Dataset(X=values[:, 1:], Y=values[:, 0])
    except ValueError as e:
        raise ConfigError(f"Invalid dataset {path}: {e}")


def dataset_frame(data: Dataset) -> pd.DataFrame:
    """Tabular form of a dataset in the ingestion column layout"""
    frame = pd.DataFrame(data.X, columns=[f"x{j}" for j in range(data.p)])
    frame.insert(0, "y", data.Y)
    return frame
