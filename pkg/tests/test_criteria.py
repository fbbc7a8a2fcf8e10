import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mspe_lab.criteria import (
    ALL_KINDS,
    aicc_at_boundary,
    criterion_record,
    criterion_record_from_rss,
    criterion_value,
    evaluate_models,
    gray_curve_factor,
    gray_curve_value,
)
from mspe_lab.errors import (
    DomainError,
    ModelFitError,
    OrderTooLargeError,
    UnsupportedKindError,
)
from mspe_lab.models import CriterionKind, ModelMask
from mspe_lab.regression import Dataset, fit_restricted_ls
from mspe_lab.search import leading_term_family

GCV, SP, RHO = CriterionKind.GCV, CriterionKind.SP, CriterionKind.RHO_HAT2
AIC, AICC = CriterionKind.AIC, CriterionKind.AICC
FPE, BIC = CriterionKind.FPE, CriterionKind.BIC


@pytest.mark.parametrize("kind", [GCV, SP, RHO])
def test_unbiased_kinds_agree_at_order_zero(kind):
    assert criterion_value(kind, 10.0, 10, 0) == pytest.approx(1.0)


@pytest.mark.parametrize(
    "kind, expected",
    [
        (GCV, 1.25),
        (SP, 9 / 7),
        (RHO, 11 / 9),
        (AIC, 0.8 * math.exp(0.4)),
        (AICC, 0.8 * math.exp(6 / 6)),
        (FPE, 0.8 * 1.2 / 0.8),
        (BIC, 0.8 * 10**0.2),
    ],
)
def test_criterion_values(kind, expected):
    assert criterion_value(kind, 8.0, 10, 2) == pytest.approx(expected, rel=1e-12)


def test_aic_example_to_six_digits():
    assert criterion_value(AIC, 8.0, 10, 2) == pytest.approx(1.19346, abs=5e-6)


@pytest.mark.parametrize(
    "kind, rho2, n, k, expected",
    [
        (AIC, 1.0, 10, 0, 1.0),
        (FPE, 2.0, 10, 5, 1.5),
        (BIC, 1.0, 100, 10, 100**0.1 * 0.81),
        (AICC, 1.0, 20, 3, math.exp(8 / 15) * 0.85**2),
    ],
)
def test_gray_curve_values(kind, rho2, n, k, expected):
    assert gray_curve_value(kind, rho2, n, k) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("kind", [GCV, SP, RHO])
def test_gray_curve_unsupported_for_unbiased_kinds(kind):
    with pytest.raises(UnsupportedKindError):
        gray_curve_value(kind, 1.0, 10, 2)


@pytest.mark.parametrize(
    "kind, n, k",
    [(GCV, 10, 9), (SP, 10, 10), (AICC, 10, 8), (AIC, 5, 4)],
)
def test_order_preconditions(kind, n, k):
    with pytest.raises(OrderTooLargeError):
        criterion_value(kind, 1.0, n, k)


def test_negative_order_is_domain_error():
    with pytest.raises(DomainError):
        criterion_value(GCV, 1.0, 10, -1)


def test_aicc_at_boundary_is_finite_or_inf():
    assert aicc_at_boundary(10, 7)
    assert criterion_value(AICC, 1.0, 10, 7) == pytest.approx(0.1 * math.exp(16))
    assert criterion_value(AICC, 1.0, 1000, 997) == math.inf


@given(
    rss=st.floats(1e-6, 1e6),
    n=st.integers(4, 400),
    frac=st.floats(0.0, 1.0, exclude_max=True),
)
def test_ordering_and_aic_identity(rss, n, frac):
    k = min(int(frac * (n - 1)), n - 2)
    gcv = criterion_value(GCV, rss, n, k)
    sp = criterion_value(SP, rss, n, k)
    rho = criterion_value(RHO, rss, n, k)
    if k >= 1:
        assert rho < gcv < sp
    else:
        assert rho == pytest.approx(gcv) and sp == pytest.approx(gcv)
    aic = criterion_value(AIC, rss, n, k)
    assert aic == pytest.approx(gcv * math.exp(2 * k / n) * (1 - k / n) ** 2, rel=1e-12)
    assert criterion_value(FPE, rss, n, k) >= aic * (1 - 1e-12)


@given(rss=st.floats(1e-3, 1e3), n=st.integers(5, 200), frac=st.floats(0.0, 0.9))
def test_criteria_strictly_increasing_in_rss(rss, n, frac):
    k = min(int(frac * n), n - 3)
    for kind in ALL_KINDS:
        larger = criterion_value(kind, rss * 1.01, n, k)
        assert larger > criterion_value(kind, rss, n, k)


def test_bias_direction_factors_on_grid():
    for n in range(8, 201):
        for k in range(2, n - 2):
            assert gray_curve_factor(AIC, n, k) < 1
            assert gray_curve_factor(FPE, n, k) < 1
            assert gray_curve_factor(AICC, n, k) > 1
            if n >= 20 and k <= n / 2:
                assert gray_curve_factor(BIC, n, k) > 1


def test_gray_curve_tracks_the_criterion_gap(gaussian_data):
    n = gaussian_data.n
    fit = fit_restricted_ls(gaussian_data, ModelMask.leading(4, 8))
    record = criterion_record(fit, n)
    for kind in (AIC, AICC, FPE, BIC):
        ratio = record.values[kind] / record.values[GCV]
        assert ratio == pytest.approx(gray_curve_factor(kind, n, 4), rel=1e-12)


def test_record_skips_aicc_past_boundary(rng):
    data = Dataset(X=rng.standard_normal((6, 4)), Y=rng.standard_normal(6))
    boundary = criterion_record(fit_restricted_ls(data, ModelMask.leading(3, 4)), 6)
    assert boundary.aicc_at_boundary and AICC in boundary.values
    beyond = criterion_record(fit_restricted_ls(data, ModelMask.leading(4, 4)), 6)
    assert AICC not in beyond.values and GCV in beyond.values


def test_record_from_rss_agrees_with_fitted_record(gaussian_data):
    for mask in leading_term_family(8):
        fit = fit_restricted_ls(gaussian_data, mask)
        fitted = criterion_record(fit, gaussian_data.n)
        assert criterion_record_from_rss(mask, fit.rss, gaussian_data.n) == fitted


def test_record_from_rss_restricts_kinds():
    mask = ModelMask.leading(37, 40)
    record = criterion_record_from_rss(mask, 2.0, 40, [AICC, GCV])
    assert set(record.values) == {AICC, GCV}
    assert record.aicc_at_boundary
    assert record.rss == 2.0 and record.k == 37


def test_evaluate_empty_family(gaussian_data):
    (record,) = evaluate_models(gaussian_data, [ModelMask(included=(), p=8)])
    expected = float(gaussian_data.Y @ gaussian_data.Y) / gaussian_data.n
    for kind in (GCV, SP, RHO):
        assert record.values[kind] == pytest.approx(expected)


def test_evaluate_nested_family_matches_direct_calls(gaussian_data):
    family = leading_term_family(5, 8)
    records = evaluate_models(gaussian_data, family, max_workers=3)
    assert [r.mask for r in records] == family
    rss = [r.rss for r in records]
    assert all(b <= a + 1e-9 for a, b in zip(rss, rss[1:]))
    for record, mask in zip(records, family):
        fit = fit_restricted_ls(gaussian_data, mask)
        for kind in ALL_KINDS:
            expected = criterion_value(kind, fit.rss, gaussian_data.n, mask.order)
            assert record.values[kind] == expected


def test_evaluate_tags_failing_mask(rng):
    x = rng.standard_normal(12)
    X = np.column_stack([x, x, rng.standard_normal(12)])
    data = Dataset(X=X, Y=rng.standard_normal(12))
    bad = ModelMask(included=(0, 1), p=3)
    with pytest.raises(ModelFitError) as excinfo:
        evaluate_models(data, [ModelMask(included=(2,), p=3), bad], max_workers=1)
    assert excinfo.value.mask == bad
