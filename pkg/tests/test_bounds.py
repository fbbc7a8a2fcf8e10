import math

import numpy as np
import pytest
import scipy.stats
from hypothesis import given
from hypothesis import strategies as st

from mspe_lab.bounds import (
    bound_report,
    chisq_tail_bound,
    deviation_bound_a4,
    deviation_bound_thm32,
    psi,
    rate_a_n,
    rate_function_K,
    rate_function_L,
    ratio_tail_bound,
    sp_deviation_bound_a5,
    uniform_bound_cor33,
)
from mspe_lab.errors import DomainError, OrderTooLargeError
from mspe_lab.models import TailSide


def test_spot_values():
    expected = 2 * math.log(1.5) - math.log(2)
    assert rate_function_K(1, 1) == pytest.approx(expected, rel=1e-12)
    assert rate_function_K(1, 1) == pytest.approx(0.117783, abs=5e-7)
    assert rate_function_L(1) == pytest.approx(0.306853, abs=5e-7)
    assert rate_function_L(-0.5) == pytest.approx(0.193147, abs=5e-7)
    assert psi(1) == 0.03125
    assert deviation_bound_thm32(100, 50, 1.0, 1.0) == pytest.approx(3.115203, abs=5e-6)
    assert rate_a_n(601, 700, 6 / 7) == pytest.approx(1.77093, abs=5e-5)


@pytest.mark.parametrize("r", [0.01, 0.5, 1.0, 7.5])
def test_rate_functions_vanish_at_zero(r):
    assert rate_function_K(r, 0) == 0
    assert rate_function_L(0) == 0
    assert psi(0) == 0


def test_K_is_larger_on_the_lower_side():
    assert rate_function_K(0.5, -0.25) > rate_function_K(0.5, 0.25)


@pytest.mark.parametrize(
    "call",
    [
        lambda: rate_function_K(0, 1),
        lambda: rate_function_K(1, -1),
        lambda: rate_function_L(-1),
        lambda: psi(-0.1),
        lambda: ratio_tail_bound(0, 3, 1),
        lambda: chisq_tail_bound(5, 0),
        lambda: uniform_bound_cor33(100, 1.0, 1, 1.0, 1.0),
        lambda: rate_a_n(0, 100, 0.5),
    ],
)
def test_domain_errors(call):
    with pytest.raises(DomainError):
        call()


@given(x=st.floats(0, 1e6), y=st.floats(0, 1e6))
def test_psi_increasing_and_bounded(x, y):
    lo, hi = sorted((x, y))
    assert psi(lo) <= psi(hi) < 0.125


def test_tail_bounds():
    expected = math.exp(-5 * rate_function_K(1, 1))
    assert ratio_tail_bound(10, 10, 1.0) == pytest.approx(expected)
    assert ratio_tail_bound(10, 10, 1.0) == pytest.approx(0.554896, abs=5e-6)
    assert ratio_tail_bound(2, 10, 0.2, TailSide.LOWER) == 0.0
    assert chisq_tail_bound(20, 1.0) == pytest.approx(math.exp(-10 * (1 - math.log(2))))
    assert chisq_tail_bound(20, 1.0, TailSide.LOWER) == 0.0
    assert 0 < chisq_tail_bound(20, 0.5, TailSide.LOWER) < 1


def test_chisq_bound_dominates_exact_tail():
    for b in (5, 20, 100):
        for eps in (0.2, 0.5, 1.5):
            exact_upper = scipy.stats.chi2.sf(b * (1 + eps), b)
            assert chisq_tail_bound(b, eps) >= exact_upper
            if eps < 1:
                exact_lower = scipy.stats.chi2.cdf(b * (1 - eps), b)
                assert chisq_tail_bound(b, eps, TailSide.LOWER) >= exact_lower


def test_thm32_behaviour():
    assert deviation_bound_thm32(100, 10, 0.0, 1.0) == 0.0
    eps_values = [0.1, 0.5, 1, 2, 5]
    decreasing = [deviation_bound_thm32(100, 10, 1.0, e) for e in eps_values]
    assert all(b < a for a, b in zip(decreasing, decreasing[1:]))
    increasing = [deviation_bound_thm32(100, k, 1.0, 1.0) for k in (0, 10, 50, 90)]
    assert all(b > a for a, b in zip(increasing, increasing[1:]))
    assert deviation_bound_thm32(100, 10, 1.0, 1e9) <= 4
    with pytest.raises(OrderTooLargeError):
        deviation_bound_thm32(100, 99, 1.0, 1.0)


def test_a4_terms():
    assert deviation_bound_a4(50, 10, 0.0, 1.0) == (0.0, 0.0, 0.0, 0.0, 0.0)
    n, k, s2 = 50, 10, 1.0
    eps = 1.01 * 2 * s2 * max(k / (n + 1 - k), (n + 1) / (n + 1 - k))
    terms = deviation_bound_a4(n, k, s2, eps)
    assert terms.b3 == 0.0 and terms.b4 == 0.0
    assert terms.total == pytest.approx(terms.b1 + terms.b2)
    empty = deviation_bound_a4(n, 0, s2, 0.5)
    assert empty.b1 == 0.0 and empty.b3 == 0.0 and empty.b2 > 0


def test_a5_terms():
    assert sp_deviation_bound_a5(50, 10, 0.0, 1.0) == (0.0, 0.0, 0.0, 0.0)
    terms = sp_deviation_bound_a5(50, 10, 1.0, 1.01 * 49 / 39)
    assert terms.c2 == 0.0
    assert terms.total == terms.c1


@pytest.mark.parametrize("n", [50, 100, 500])
@pytest.mark.parametrize("ratio", [0.1, 0.5, 0.9])
@pytest.mark.parametrize("mult", [0.1, 0.25, 0.5, 1.0, 2.0, 5.0])
def test_dominance_chain(n, ratio, mult):
    k = int(round(ratio * n))
    s2 = 1.7
    eps = mult * s2
    a4 = deviation_bound_a4(n, k, s2, eps)
    assert a4.total <= deviation_bound_thm32(n, k, s2, eps) + 1e-12
    a5 = sp_deviation_bound_a5(n, k, s2, eps)
    assert a5.total <= a5.psi_form + 1e-12
    assert min(a4) >= 0 and min(a5) >= 0


def test_cor33_relations():
    n, k, c, eps = 200, 40, 2.0, 1.0
    single = uniform_bound_cor33(n, k / n, 1, c, eps)
    assert single == pytest.approx(deviation_bound_thm32(n, k, c, eps))
    assert uniform_bound_cor33(n, k / n, 2, c, eps) == pytest.approx(2 * single)
    value = uniform_bound_cor33(700, 6 / 7, 601, 26.0, 2.0)
    shrink = 1 / 7
    expected = 4 * 601 * math.exp(-700 * shrink * psi(2 / 52 * shrink))
    assert value == pytest.approx(expected)


def test_rate_a_n_scaling():
    assert rate_a_n(1, 10**6, 0.0) == pytest.approx(math.sqrt(math.log(2) / 10**6))
    assert rate_a_n(50, 4000, 0.3) == pytest.approx(rate_a_n(50, 1000, 0.3) / 2)


def test_bound_report_fields():
    report = bound_report(100, 50, 1.0, 1.0, card=51, c=2.0)
    assert report.thm32 == pytest.approx(3.115203, abs=5e-6)
    assert report.a4_sum == pytest.approx(report.b1 + report.b2 + report.b3 + report.b4)
    assert report.cor33 == pytest.approx(uniform_bound_cor33(100, 0.5, 51, 2.0, 1.0))
    assert report.rate_a_n == pytest.approx(rate_a_n(51, 100, 0.5))
    bare = bound_report(100, 50, 0.0, 1.0)
    assert bare.thm32 == bare.a4_sum == bare.a5_sum == 0.0
    assert bare.cor33 is None and bare.rate_a_n is None


def test_killeen_inequality_on_exact_tail():
    # A/B - a/b > eps  <=>  A - (a/b + eps) B > 0, i.e. F_{a,b} > (b/a)(a/b + eps)
    for a, b in [(2, 10), (10, 10), (50, 50)]:
        for eps in (0.1, 0.5, 1.0):
            exact = scipy.stats.f.sf((b / a) * (a / b + eps), a, b)
            assert np.log(exact) / b <= -rate_function_K(a / b, eps) / 2 + 1e-12
