import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_orthonormal(rng, d, k):
    """Orthonormal (d, k) via QR of a Gaussian draw."""
    q, _ = np.linalg.qr(rng.normal(size=(d, k)))
    return q
