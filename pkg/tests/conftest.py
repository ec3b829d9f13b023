import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def complex_matrix(rng):
    """Factory for seeded complex Gaussian matrices."""

    def make(n, m=None, scale=1.0):
        m = n if m is None else m
        return scale * (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m)))

    return make


@pytest.fixture
def unitary(complex_matrix):
    def make(n):
        q, _ = np.linalg.qr(complex_matrix(n))
        return q

    return make
