"""
Shared fixtures for the mspe-lab test suite
"""

import numpy as np
import pytest

from mspe_lab.models import DgpSpec
from mspe_lab.regression import Dataset


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def gaussian_data(rng: np.random.Generator) -> Dataset:
    """n=40, p=8 Gaussian design with a decaying signal"""
    X = rng.standard_normal((40, 8))
    beta = np.array([2.0, -1.5, 1.0, 0.5, 0.25, 0.0, 0.0, 0.0])
    Y = X @ beta + rng.standard_normal(40)
    return Dataset(X=X, Y=Y)


@pytest.fixture
def block_data(rng: np.random.Generator) -> Dataset:
    """8 columns in 4 blocks of 2; blocks 0 and 2 carry the signal"""
    X = rng.standard_normal((30, 8))
    beta = np.array([1.5, 1.0, 0.0, 0.0, 0.8, -0.6, 0.0, 0.1])
    Y = X @ beta + 0.5 * rng.standard_normal(30)
    return Dataset(X=X, Y=Y)


@pytest.fixture
def small_dgp() -> DgpSpec:
    return DgpSpec(beta=[1.0, 1.0, 0.5, 0.0, 0.0, 0.0], sigma=1.0)


@pytest.fixture
def write_dataset(tmp_path):
    """Write a Dataset as CSV with header y,x0,... and return the path"""

    def _write(data: Dataset, name: str = "data.csv") -> str:
        from mspe_lab.regression import dataset_frame

        path = tmp_path / name
        dataset_frame(data).to_csv(path, index=False)
        return str(path)

    return _write
