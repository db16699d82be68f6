import numpy as np
import pytest

from sheetlab import models
from sheetlab.spectral import SpectralDiscretization


@pytest.fixture(scope="session")
def bs2():
    """Brownian sheet, N=2, d=1, on [1,2]^2."""
    return models.brownian_sheet(((1.0, 2.0), (1.0, 2.0)))


@pytest.fixture(scope="session")
def fbs07():
    return models.fractional_brownian_sheet(0.7, ((0.5, 2.0), (0.5, 2.0)))


@pytest.fixture(scope="session")
def wave_white():
    return models.wave_model(1.0, ((0.5, 1.5), (0.5, 1.5)))


@pytest.fixture(scope="session")
def small_disc():
    """Cheap spectral discretization for Monte Carlo band sampling."""
    return SpectralDiscretization(cutoff=32.0, max_panel_width=1.0)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(1234)
