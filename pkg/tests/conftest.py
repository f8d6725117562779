import numpy as np
import pytest

import zyglab as z


@pytest.fixture(scope="session")
def rho():
    return z.make_mollifier()


@pytest.fixture(scope="session")
def fam():
    return z.make_lp_family()


@pytest.fixture(scope="session")
def grid_2pi():
    """Corpus grid: 2^14 points on [-pi, pi), integer frequencies."""
    return z.corpus_grid()


@pytest.fixture(scope="session")
def grid_mid():
    """2^15 points on [-pi, pi): resolution floor 8*spacing ~ 1.5e-3."""
    return z.make_grid(2**15, 2 * np.pi)


@pytest.fixture(scope="session")
def grid_fine():
    """2^16 points on [-pi, pi): used where lacunary signals need range."""
    return z.make_grid(2**16, 2 * np.pi)


@pytest.fixture(scope="session")
def sg_mid():
    """17 scales, ratio 2^-1/2, spanning [0.002, 0.512]."""
    return z.ScaleGrid(0.002, 0.512, 17)


@pytest.fixture(scope="session")
def fit_win_mid():
    """Small-scale half of sg_mid: 9 scales over [0.002, 0.032]."""
    return (8, 16)


@pytest.fixture(scope="session")
def sg_fine():
    """33 scales on [0.001, 0.256]; indices 16..32 span [0.001, 0.016]."""
    return z.ScaleGrid(0.001, 0.256, 33)


@pytest.fixture(scope="session")
def fit_win_fine():
    return (16, 32)


@pytest.fixture(scope="session")
def mu_normalized(rho):
    return z.normalize_weakly_radial(z.wavelet_mu(rho))


@pytest.fixture(scope="session")
def g3_normalized(rho):
    return z.normalize_weakly_radial(z.wavelet_from_derivative(rho, 3))
