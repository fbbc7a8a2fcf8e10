"""
Selection objective functions and the deterministic transforms of rho^2 they track
"""

import logging
import math
from typing import Dict, Iterable, List, Optional, Sequence

from .errors import (
    DomainError,
    ModelFitError,
    MspeLabError,
    OrderTooLargeError,
    UnsupportedKindError,
)
from .models import CriterionKind, CriterionRecord, ModelMask
from .parallel import ordered_map
from .regression import Dataset, FitResult, fit_restricted_ls

logger = logging.getLogger(__name__)

ALL_KINDS: List[CriterionKind] = list(CriterionKind)

# Criteria whose gray curve is rho^2 itself
UNBIASED_KINDS = (CriterionKind.GCV, CriterionKind.SP, CriterionKind.RHO_HAT2)


def _safe_exp(x: float) -> float:
    # AICc near k = n - 3 can exceed the double range
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def _check_order(kind: CriterionKind, n: int, k: int) -> None:
    if k < 0:
        raise DomainError(f"Model order must be nonnegative, got {k}")
    if k >= n - 1:
        raise OrderTooLargeError(k, n)
    if kind == CriterionKind.AICC and k >= n - 2:
        raise OrderTooLargeError(k, n, limit=n - 2)


def criterion_value(kind: CriterionKind, rss: float, n: int, k: int) -> float:
    """
    Value of a selection objective for a model of order k

    AIC, AICc and BIC are on the exponential scale, so every kind is a
    positive multiple of rss.
    """
    _check_order(kind, n, k)
    if rss < 0:
        raise ValueError(f"rss must be nonnegative, got {rss}")
    if rss == 0:
        return 0.0

    if kind == CriterionKind.GCV:
        return (rss / (n - k)) * (n / (n - k))
    if kind == CriterionKind.SP:
        return (rss / (n - k)) * ((n - 1) / (n - 1 - k))
    if kind == CriterionKind.RHO_HAT2:
        return (rss / (n - k)) * ((n + 1) / (n + 1 - k))
    if kind == CriterionKind.AIC:
        return (rss / n) * math.exp(2 * k / n)
    if kind == CriterionKind.AICC:
        return (rss / n) * _safe_exp(2 * (k + 1) / (n - k - 2))
    if kind == CriterionKind.FPE:
        return (rss / n) * (1 + k / n) / (1 - k / n)
    if kind == CriterionKind.BIC:
        return (rss / n) * n ** (k / n)
    raise UnsupportedKindError(f"Unknown criterion kind: {kind}")


def gray_curve_factor(kind: CriterionKind, n: int, k: int) -> float:
    """Ratio of a criterion to GCV for a model of order k"""
    if kind in UNBIASED_KINDS:
        raise UnsupportedKindError(
            f"{kind.value} tracks rho^2 itself; it has no gray-curve factor"
        )
    _check_order(kind, n, k)
    shrink = (1 - k / n) ** 2
    if kind == CriterionKind.AIC:
        return math.exp(2 * k / n) * shrink
    if kind == CriterionKind.FPE:
        return (1 + k / n) * (1 - k / n)
    if kind == CriterionKind.AICC:
        return _safe_exp(2 * (k + 1) / (n - k - 2)) * shrink
    if kind == CriterionKind.BIC:
        return n ** (k / n) * shrink
    raise UnsupportedKindError(f"Unknown criterion kind: {kind}")


def gray_curve_value(kind: CriterionKind, rho2: float, n: int, k: int) -> float:
    """
    The transform of rho^2 that a criterion approximates

    Raises:
        UnsupportedKindError: for GCV, SP and RHO_HAT2
    """
    return rho2 * gray_curve_factor(kind, n, k)


def aicc_at_boundary(n: int, k: int) -> bool:
    """AICc's exponent blows up at k = n - 3"""
    return k == n - 3


def criterion_record_from_rss(
    mask: ModelMask, rss: float, n: int, kinds: Iterable[CriterionKind] = ALL_KINDS
) -> CriterionRecord:
    """Criterion values of a model whose RSS is already known"""
    k = mask.order
    values: Dict[CriterionKind, float] = {}
    for kind in kinds:
        if kind == CriterionKind.AICC and k >= n - 2:
            continue
        values[kind] = criterion_value(kind, rss, n, k)

    boundary = CriterionKind.AICC in values and aicc_at_boundary(n, k)
    if boundary:
        logger.warning("AICc evaluated at the boundary order k = n - 3 = %d", k)
    return CriterionRecord(
        mask=mask, k=k, rss=rss, values=values, aicc_at_boundary=boundary
    )


def criterion_record(
    fit: FitResult, n: int, kinds: Iterable[CriterionKind] = ALL_KINDS
) -> CriterionRecord:
    """Criterion values of a fitted model"""
    return criterion_record_from_rss(fit.mask, fit.rss, n, kinds)


def fit_family(
    data: Dataset, family: Sequence[ModelMask], max_workers: Optional[int] = None
) -> List[FitResult]:
    """Fit every mask of a family, tagging failures with the offending mask"""

    def fit_one(mask: ModelMask) -> FitResult:
        try:
            return fit_restricted_ls(data, mask)
        except MspeLabError as e:
            head = list(mask.included)[:10]
            raise ModelFitError(
                f"Fit failed for model of order {mask.order} {head}: {e}",
                mask=mask,
            ) from e

    return ordered_map(fit_one, list(family), max_workers)


def evaluate_models(
    data: Dataset, family: Sequence[ModelMask], max_workers: Optional[int] = None
) -> List[CriterionRecord]:
    """
    Fit each candidate model and evaluate all criteria

    Args:
        data: The sample
        family: Candidate models, each with |m| < n - 1

    Returns:
        One CriterionRecord per mask, in input order

    Raises:
        ModelFitError: wrapping the fit error of the offending mask
    """
    fits = fit_family(data, family, max_workers)
    return [criterion_record(fit, data.n) for fit in fits]
