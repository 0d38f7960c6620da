"""Shared fixtures: small grids and quick noiseless stacks.

Grid sizes here keep the object-plane sampling (0.4 um) of the default
geometry, so the 2NA/lambda < Nyquist guard holds on every size and transfer
functions built at 16x16 are physically the same band as at 256x256.
"""

import numpy as np
import pytest

from dpckit.core import FrequencyGrid
from dpckit.forward import build_tfs, simulate_stack, wedding_cake

NA = 0.25
LAMBDA_UM = 0.532


def make_grid(n):
    return FrequencyGrid(width=n, height=n)


@pytest.fixture(scope="session")
def grid16():
    return make_grid(16)


@pytest.fixture(scope="session")
def grid32():
    return make_grid(32)


@pytest.fixture(scope="session")
def grid64():
    return make_grid(64)


@pytest.fixture(scope="session")
def tfs64(grid64):
    return build_tfs(grid64, NA, LAMBDA_UM)


@pytest.fixture(scope="session")
def cake64(grid64):
    return wedding_cake(grid64)


@pytest.fixture(scope="session")
def clean_stack64(tfs64, cake64):
    """Noiseless, background-free wedding-cake acquisition on 64x64."""
    return simulate_stack(cake64, tfs64, na=NA, lambda_um=LAMBDA_UM)


@pytest.fixture(scope="session")
def noisy_stack64(tfs64, cake64):
    """Same acquisition at 20 dB SNR, seed 0."""
    return simulate_stack(cake64, tfs64, snr_db=20.0, seed=0,
                          na=NA, lambda_um=LAMBDA_UM)


@pytest.fixture
def rng():
    return np.random.default_rng(42)
