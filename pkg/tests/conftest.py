import numpy as np
import pytest

from meanforce.spectral import SpectralDensity


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


@pytest.fixture
def density():
    """Reference peaked density: omega0 = 1, gamma = 0.2, omega_z = 0.02."""
    return SpectralDensity("peaked", 1.0, 0.2, 0.02)


def random_hermitian(rng, n, complex_valued=True):
    b = rng.normal(size=(n, n))
    if complex_valued:
        b = b + 1j * rng.normal(size=(n, n))
    return b + b.conj().T


def random_state(rng, n=4):
    b = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = b @ b.conj().T
    return rho / np.trace(rho)
