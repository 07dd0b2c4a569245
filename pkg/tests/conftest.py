import numpy as np
import pytest

from gamma_factor import DecomposablePoint, SeededRng, euclidean


def e(k, dim=2):
    v = np.zeros(dim)
    v[k] = 1.0
    return v


def point(*factors, spaces=None):
    factors = [np.asarray(f, dtype=float) for f in factors]
    spaces = spaces or [euclidean(f.size) for f in factors]
    return DecomposablePoint(spaces, factors)


@pytest.fixture
def rng():
    return SeededRng(1234)


@pytest.fixture
def nprng():
    return np.random.default_rng(20240601)
