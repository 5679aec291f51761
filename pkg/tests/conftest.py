import numpy as np
import pytest


def make_series(kind, n, rng):
    if kind == "noise":
        return rng.normal(size=n)
    if kind == "ar":
        x = np.zeros(n)
        eps = rng.normal(size=n)
        for t in range(1, n):
            x[t] = 0.8 * x[t - 1] + eps[t]
        return x
    if kind == "sine":
        period = rng.uniform(15.0, 60.0)
        t = np.arange(n)
        return np.sin(2.0 * np.pi * t / period) + 0.3 * rng.normal(size=n)
    if kind == "walk":
        return np.cumsum(rng.normal(size=n))
    raise ValueError(kind)


KINDS = ("noise", "ar", "sine", "walk")


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240613)


@pytest.fixture(scope="session")
def mixed_corpus():
    """25 series of each kind at length 500, deterministic."""
    gen = np.random.default_rng(99)
    out = []
    for kind in KINDS:
        for _ in range(25):
            out.append(make_series(kind, 500, gen))
    return out
