import numpy as np
import pytest

from robloc import DataSet, bundled_dataset, random_gp_dataset


@pytest.fixture
def triangle():
    return DataSet(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))


@pytest.fixture
def square_corners():
    return DataSet(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]))


@pytest.fixture
def demo10():
    return bundled_dataset("demo10_2d")


@pytest.fixture
def demo5():
    return bundled_dataset("demo5_1d")


@pytest.fixture
def demo9():
    return bundled_dataset("demo9_1d")


def gp_datasets(count, n, k, seed0):
    """Deterministic stream of general-position datasets for property runs."""
    return [random_gp_dataset(n, k, seed0 + i) for i in range(count)]
