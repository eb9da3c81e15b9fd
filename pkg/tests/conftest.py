import numpy as np
import pytest

from maskbench.data import LabelVector, TimeSeriesTensor


def make_tensor(values, observed=None, names=None):
    """Build a TimeSeriesTensor from nested lists / arrays."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim == 2:  # single sample convenience
        values = values[None, :, :]
    if observed is None:
        observed = np.ones_like(values, dtype=bool)
    else:
        observed = np.asarray(observed, dtype=bool)
        if observed.ndim == 2:
            observed = observed[None, :, :]
    n, s, f = values.shape
    if names is None:
        names = tuple(f"f{j}" for j in range(f))
    return TimeSeriesTensor(values, observed, names, np.arange(s, dtype=float))


def random_tensor(rng, n, s, f, observed_frac=0.8):
    values = rng.standard_normal((n, s, f))
    observed = rng.random((n, s, f)) < observed_frac
    return make_tensor(values, observed)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_tensor():
    # one sample, 5 steps, 2 features: feature 0 counts 1..5, feature 1 is 10x
    vals = np.stack([np.arange(1.0, 6.0), np.arange(10.0, 60.0, 10.0)], axis=1)
    return make_tensor(vals)


@pytest.fixture
def labels10():
    return LabelVector(np.array([1, 1, 0, 0, 0, 0, 0, 0, 0, 0]))
