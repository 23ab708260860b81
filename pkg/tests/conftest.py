import numpy as np
import pytest

from ftsbreak.fda import FunctionalTimeSeries
from ftsbreak.simlab import fourier_basis

GRID = np.linspace(0.0, 1.0, 101)


def smooth_iid(n, rng, grid=GRID, sd=(1.0, 0.8, 0.6, 0.4, 0.2)):
    """i.i.d. Gaussian curves spanned by the first few Fourier functions."""
    sd = np.asarray(sd)
    basis = fourier_basis(grid, sd.size)
    return FunctionalTimeSeries(grid, (rng.standard_normal((n, sd.size)) * sd) @ basis)


def ar_scores(n, rng, phi, grid=GRID, sd=(1.0, 0.8, 0.6, 0.4, 0.2)):
    sd = np.asarray(sd)
    z = rng.standard_normal((n, sd.size)) * sd
    s = np.empty_like(z)
    s[0] = z[0]
    for t in range(1, n):
        s[t] = phi * s[t - 1] + z[t]
    return FunctionalTimeSeries(grid, s @ fourier_basis(grid, sd.size))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def grid():
    return GRID.copy()
