import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mspe_lab.errors import ConfigError, OrderTooLargeError, RankDeficientError
from mspe_lab.models import ModelMask
from mspe_lab.regression import (
    Dataset,
    fit_restricted_ls,
    load_dataset_csv,
    project_onto_columns,
)


def _random_data(seed: int, n: int = 30, p: int = 8) -> Dataset:
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    Y = X[:, :3] @ np.array([1.0, -0.5, 0.25]) + rng.standard_normal(n)
    return Dataset(X=X, Y=Y)


def test_empty_mask_returns_zero_coefficients(gaussian_data):
    fit = fit_restricted_ls(gaussian_data, ModelMask(included=(), p=gaussian_data.p))
    assert np.all(fit.beta_hat == 0)
    assert fit.rss == pytest.approx(float(gaussian_data.Y @ gaussian_data.Y))


def test_projection_hand_example():
    coef, rss = project_onto_columns(np.array([[1.0], [0.0]]), np.array([2.0, 3.0]))
    assert coef[0] == pytest.approx(2.0)
    assert rss == pytest.approx(9.0)


def test_response_in_span_gives_zero_rss(rng):
    X = rng.standard_normal((20, 5))
    data = Dataset(X=X, Y=X[:, [1, 3]] @ np.array([2.0, -1.0]))
    fit = fit_restricted_ls(data, ModelMask(included=(1, 3), p=5))
    assert fit.rss == pytest.approx(0.0, abs=1e-18)
    np.testing.assert_allclose(fit.beta_hat, [0.0, 2.0, 0.0, -1.0, 0.0], atol=1e-12)


def test_beta_hat_is_zero_outside_mask(gaussian_data):
    fit = fit_restricted_ls(gaussian_data, ModelMask(included=(0, 2, 5), p=8))
    assert np.all(fit.beta_hat[[1, 3, 4, 6, 7]] == 0)
    resid = gaussian_data.Y - gaussian_data.X @ fit.beta_hat
    assert fit.rss == pytest.approx(float(resid @ resid))
    assert fit.rss <= float(gaussian_data.Y @ gaussian_data.Y)


def test_residual_orthogonal_to_selected_columns(gaussian_data):
    mask = ModelMask(included=(0, 1, 4, 7), p=8)
    fit = fit_restricted_ls(gaussian_data, mask)
    X_m = gaussian_data.X[:, mask.index_array()]
    resid = gaussian_data.Y - gaussian_data.X @ fit.beta_hat
    tol = 1e-10 * np.linalg.norm(gaussian_data.Y) * np.linalg.norm(X_m)
    assert np.all(np.abs(X_m.T @ resid) < tol)


def test_order_too_large_is_rejected(rng):
    data = Dataset(X=rng.standard_normal((5, 4)), Y=rng.standard_normal(5))
    with pytest.raises(OrderTooLargeError):
        fit_restricted_ls(data, ModelMask.leading(4, 4))


def test_collinear_columns_report_rank(rng):
    x = rng.standard_normal(10)
    X = np.column_stack([x, 2 * x, rng.standard_normal(10)])
    data = Dataset(X=X, Y=rng.standard_normal(10))
    mask = ModelMask(included=(0, 1, 2), p=3)
    with pytest.raises(RankDeficientError) as excinfo:
        fit_restricted_ls(data, mask)
    assert excinfo.value.rank == 2
    assert excinfo.value.mask == mask


def test_mask_must_match_dataset_width(gaussian_data):
    with pytest.raises(ValueError):
        fit_restricted_ls(gaussian_data, ModelMask.leading(2, 5))


@pytest.mark.parametrize(
    "X, Y",
    [
        (np.ones((2, 1)), np.ones(2)),
        (np.array([[1.0], [np.nan], [0.0]]), np.ones(3)),
        (np.ones((4, 2)), np.ones(3)),
    ],
)
def test_invalid_datasets(X, Y):
    with pytest.raises(ValueError):
        Dataset(X=X, Y=Y)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), k=st.integers(0, 7))
def test_nesting_monotonicity(seed, k):
    data = _random_data(seed)
    small = fit_restricted_ls(data, ModelMask.leading(k, 8))
    large = fit_restricted_ls(data, ModelMask.leading(k + 1, 8))
    assert large.rss <= small.rss + 1e-9 * max(1.0, small.rss)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), k=st.integers(1, 8))
def test_column_permutation_invariance(seed, k):
    data = _random_data(seed)
    perm = np.random.default_rng(seed).permutation(8)
    permuted = Dataset(X=data.X[:, perm], Y=data.Y)
    inverse = np.argsort(perm)

    original = fit_restricted_ls(data, ModelMask.leading(k, 8))
    mask = ModelMask(included=tuple(int(inverse[j]) for j in range(k)), p=8)
    moved = fit_restricted_ls(permuted, mask)
    assert moved.rss == pytest.approx(original.rss, rel=1e-9, abs=1e-12)


def test_dataset_csv_round_trip(gaussian_data, write_dataset):
    loaded = load_dataset_csv(write_dataset(gaussian_data))
    np.testing.assert_array_equal(loaded.X, gaussian_data.X)
    np.testing.assert_array_equal(loaded.Y, gaussian_data.Y)


def test_dataset_csv_header_is_checked(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("y,a,b\n1,2,3\n4,5,6\n7,8,9\n")
    with pytest.raises(ConfigError):
        load_dataset_csv(path)


def test_missing_dataset_is_config_error(tmp_path):
    with pytest.raises(ConfigError):
        load_dataset_csv(tmp_path / "missing.csv")
