import numpy as np
import pytest

from omv_tools.bitcore import BitMatrix, BitVector


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def random_matrix(rng):
    def factory(n: int, density: float = 0.5, cols: int | None = None) -> BitMatrix:
        return BitMatrix.random(n, cols if cols is not None else n, density, rng)
    return factory


@pytest.fixture
def random_vector(rng):
    def factory(n: int, density: float = 0.5) -> BitVector:
        return BitVector.from_bits((rng.random(n) < density).astype(np.uint8))
    return factory
