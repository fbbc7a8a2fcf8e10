"""
Finite-sample exponential bounds on the estimation error of GCV-type criteria

The rate functions K, L and Psi are the building blocks; every deviation
bound is an exponential of one of them. Bounds larger than one are returned
as-is.
"""

import logging
import math
from typing import NamedTuple, Optional

from .errors import DomainError, OrderTooLargeError
from .models import BoundReport, TailSide

logger = logging.getLogger(__name__)


class A4Terms(NamedTuple):
    """Four-term bound on P(|rho_hat^2 - rho^2| > eps)"""

    b1: float
    b2: float
    b3: float
    b4: float
    total: float


class A5Terms(NamedTuple):
    """Two-term bound on P(|S_p - R^2| > eps) and its Psi-form majorant"""

    c1: float
    c2: float
    total: float
    psi_form: float


def rate_function_K(r: float, c: float) -> float:
    """
    K(r, c) = (1 + r) log((1 + r + c)/(1 + r)) - r log((r + c)/r)

    Large-deviation rate of A/B - a/b for independent chi-squares with
    a/b = r. Nonnegative, zero only at c = 0.

    Raises:
        DomainError: unless r > 0 and c > -r
    """
    if not r > 0:
        raise DomainError(f"K(r, c) needs r > 0, got r={r}")
    if not c > -r:
        raise DomainError(f"K(r, c) needs c > -r, got r={r}, c={c}")
    value = (1 + r) * math.log1p(c / (1 + r)) - r * math.log1p(c / r)
    return max(value, 0.0)


def rate_function_L(c: float) -> float:
    """L(c) = c - log(1 + c), the chi-square rate function"""
    if not c > -1:
        raise DomainError(f"L(c) needs c > -1, got c={c}")
    return max(c - math.log1p(c), 0.0)


def psi(x: float) -> float:
    """Psi(x) = (x / (x + 1))^2 / 8, increasing with supremum 1/8"""
    if x < 0:
        raise DomainError(f"Psi(x) needs x >= 0, got x={x}")
    return (x / (x + 1)) ** 2 / 8


def _check_positive_eps(eps: float) -> None:
    if not eps > 0:
        raise DomainError(f"eps must be > 0, got {eps}")


def _check_sigma2(sigma2_m: float) -> None:
    if sigma2_m < 0:
        raise DomainError(f"sigma2_m must be >= 0, got {sigma2_m}")


def ratio_tail_bound(
    a: int, b: int, eps: float, side: TailSide = TailSide.UPPER
) -> float:
    """
    Bound on P(A/B - a/b > eps) (UPPER) or P(A/B - a/b < -eps) (LOWER)
    for independent A ~ chi2_a and B ~ chi2_b
    """
    if a < 1 or b < 1:
        raise DomainError(f"Degrees of freedom must be >= 1, got a={a}, b={b}")
    _check_positive_eps(eps)
    r = a / b
    if side == TailSide.UPPER:
        return math.exp(-(b / 2) * rate_function_K(r, eps))
    if eps >= r:
        return 0.0
    return math.exp(-(b / 2) * rate_function_K(r, -eps))


def chisq_tail_bound(b: int, eps: float, side: TailSide = TailSide.UPPER) -> float:
    """Bound on P(B/b - 1 > eps) (UPPER) or P(B/b - 1 < -eps) (LOWER) for B ~ chi2_b"""
    if b < 1:
        raise DomainError(f"Degrees of freedom must be >= 1, got b={b}")
    _check_positive_eps(eps)
    if side == TailSide.UPPER:
        return math.exp(-(b / 2) * rate_function_L(eps))
    if eps >= 1:
        return 0.0
    return math.exp(-(b / 2) * rate_function_L(-eps))


def deviation_bound_thm32(n: int, k: int, sigma2_m: float, eps: float) -> float:
    """
    Simple bound on P(|GCV-type estimate - target| > eps) for a model of order k

    4 exp[-n (1 - k/n) Psi((eps / (2 sigma2_m)) (1 - k/n))], zero when
    sigma2_m = 0. It never drops below 4 exp(-(n - k)/8), however large eps is.
    """
    if k >= n - 1:
        raise OrderTooLargeError(k, n)
    _check_positive_eps(eps)
    _check_sigma2(sigma2_m)
    if sigma2_m == 0:
        return 0.0
    shrink = 1 - k / n
    return 4 * math.exp(-n * shrink * psi((eps / (2 * sigma2_m)) * shrink))


def deviation_bound_a4(n: int, k: int, sigma2_m: float, eps: float) -> A4Terms:
    """
    Sharper four-term bound on P(|rho_hat^2(m) - rho^2(m)| > eps)

    B1 and B3 bound the two tails of the F-type ratio part, B2 and B4 the
    two tails of the chi-square part. For k = 0 the ratio part vanishes
    identically, so B1 = B3 = 0.
    """
    if k >= n - 1:
        raise OrderTooLargeError(k, n)
    _check_positive_eps(eps)
    _check_sigma2(sigma2_m)
    if sigma2_m == 0:
        return A4Terms(0.0, 0.0, 0.0, 0.0, 0.0)

    s = eps / (2 * sigma2_m)
    ratio_df = n + 1 - k
    r = k / ratio_df
    chisq_arg = s * ratio_df / (n + 1)

    if k == 0:
        b1 = b3 = 0.0
    else:
        b1 = math.exp(-(ratio_df / 2) * rate_function_K(r, s))
        b3 = math.exp(-(ratio_df / 2) * rate_function_K(r, -s)) if s < r else 0.0
    b2 = math.exp(-((n - k) / 2) * rate_function_L(chisq_arg))
    b4 = 0.0
    if chisq_arg < 1:
        b4 = math.exp(-((n - k) / 2) * rate_function_L(-chisq_arg))
    return A4Terms(b1, b2, b3, b4, b1 + b2 + b3 + b4)


def sp_deviation_bound_a5(n: int, k: int, sigma2_m: float, eps: float) -> A5Terms:
    """Bound on P(|S_p(m) - R^2(m)| > eps) with its simplified Psi-form"""
    if k >= n - 1:
        raise OrderTooLargeError(k, n)
    _check_positive_eps(eps)
    _check_sigma2(sigma2_m)
    if sigma2_m == 0:
        return A5Terms(0.0, 0.0, 0.0, 0.0)

    t = eps / sigma2_m
    arg = t * (n - 1 - k) / (n - 1)
    c1 = math.exp(-((n - k) / 2) * rate_function_L(arg))
    c2 = math.exp(-((n - k) / 2) * rate_function_L(-arg)) if arg < 1 else 0.0
    psi_form = 2 * math.exp(-(n - k) * psi(t * (1 - k / (n - 1))))
    return A5Terms(c1, c2, c1 + c2, psi_form)


def _check_ratio(r_n: float) -> None:
    if not 0 <= r_n < 1:
        raise DomainError(f"r_n must lie in [0, 1), got {r_n}")


def uniform_bound_cor33(n: int, r_n: float, card: int, c: float, eps: float) -> float:
    """
    Union bound over a family of card models, each of order at most n r_n,
    with Var[y] <= c: 4 card exp[-n (1 - r_n) Psi((eps / (2c)) (1 - r_n))]
    """
    _check_ratio(r_n)
    _check_positive_eps(eps)
    if card < 1:
        raise DomainError(f"Family size must be >= 1, got {card}")
    if not c > 0:
        raise DomainError(f"c must be > 0, got {c}")
    return 4 * card * math.exp(-n * (1 - r_n) * psi((eps / (2 * c)) * (1 - r_n)))


def rate_a_n(card: int, n: int, r_n: float) -> float:
    """Uniform consistency rate sqrt(log(card + 1) / (n (1 - r_n)^3))"""
    _check_ratio(r_n)
    if card < 1:
        raise DomainError(f"Family size must be >= 1, got {card}")
    if n < 1:
        raise DomainError(f"Sample size must be >= 1, got {n}")
    return math.sqrt(math.log(card + 1) / (n * (1 - r_n) ** 3))


def bound_report(
    n: int,
    k: int,
    sigma2_m: float,
    eps: float,
    card: Optional[int] = None,
    c: Optional[float] = None,
) -> BoundReport:
    """
    Evaluate every bound at one (n, k, sigma2_m, eps)

    The family-wide quantities use r_n = k/n and are filled in only when
    the family size (and, for the union bound, c) is given.
    """
    thm32 = deviation_bound_thm32(n, k, sigma2_m, eps)
    a4 = deviation_bound_a4(n, k, sigma2_m, eps)
    a5 = sp_deviation_bound_a5(n, k, sigma2_m, eps)

    r_n = k / n
    cor33: Optional[float] = None
    if card is not None and c is not None:
        cor33 = uniform_bound_cor33(n, r_n, card, c, eps)
    a_n = rate_a_n(card, n, r_n) if card is not None else None

    if thm32 > 1:
        logger.warning(
            "Bound is vacuous at n=%d, k=%d, eps=%g: %.4g > 1", n, k, eps, thm32
        )

    return BoundReport(
        n=n,
        k=k,
        sigma2_m=sigma2_m,
        epsilon=eps,
        thm32=thm32,
        b1=a4.b1,
        b2=a4.b2,
        b3=a4.b3,
        b4=a4.b4,
        a4_sum=a4.total,
        c1=a5.c1,
        c2=a5.c2,
        a5_sum=a5.total,
        a5_psi_form=a5.psi_form,
        cor33=cor33,
        rate_a_n=a_n,
    )
