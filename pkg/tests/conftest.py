import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


def rel(x, y):
    """Relative Frobenius distance of `x` from the reference `y`."""
    x, y = np.asarray(x), np.asarray(y)
    scale = np.linalg.norm(y)
    return np.linalg.norm(x - y) / (scale if scale else 1.0)


def brute_bcirc(a):
    """Block circulant matrix built block by block (independent of the library)."""
    n1, n2, p = a.shape
    out = np.zeros((n1 * p, n2 * p), dtype=complex)
    for i in range(p):
        for j in range(p):
            out[i * n1:(i + 1) * n1, j * n2:(j + 1) * n2] = a[:, :, (i - j) % p]
    return out


def brute_unfold(a):
    return np.vstack([a[:, :, k] for k in range(a.shape[2])])


def random_tensor(rng, shape, complex_=False):
    a = rng.standard_normal(shape)
    if complex_:
        a = a + 1j * rng.standard_normal(shape)
    return a


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
