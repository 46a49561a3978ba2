"""
Shared pytest fixtures: the standard signal models and a solver profile
coarse enough for the test suite.
"""

import numpy as np
import pytest
from scipy import special, stats

from config import SolverOptions
from signal_models import beta_precision_model, four_signal_model, model_from_target_curve, uniform_model

UNIFORM_FIXED_POINT = (np.sqrt(5.0) - 1.0) / 4.0      # p = 0.8, prior 1/2
STEEP_FIXED_POINT = 0.3


def steep_psi(s):
    """Falls from 1/2 to 0.3 on [0, 0.3], then climbs back steeply around 0.65."""
    s = np.asarray(s, dtype=float)
    left = 0.3 + 0.2 * special.betainc(2.0, 2.0, np.clip(1.0 - s / 0.3, 0.0, 1.0))
    right = 0.3 + 0.2 * special.betainc(20.0, 20.0, np.clip((s - 0.3) / 0.7, 0.0, 1.0))
    return np.where(s <= STEEP_FIXED_POINT, left, right)


def steep_psi_prime(s):
    s = np.asarray(s, dtype=float)
    left = -0.2 * stats.beta.pdf(np.clip(1.0 - s / 0.3, 0.0, 1.0), 2.0, 2.0) / 0.3
    right = 0.2 * stats.beta.pdf(np.clip((s - 0.3) / 0.7, 0.0, 1.0), 20.0, 20.0) / 0.7
    return np.where(s <= STEEP_FIXED_POINT, left, right)


@pytest.fixture(scope="session")
def uniform():
    return uniform_model()


@pytest.fixture(scope="session")
def four_signal():
    return four_signal_model(0.7, 0.7)


@pytest.fixture(scope="session")
def beta_model():
    return beta_precision_model(0.5)


@pytest.fixture(scope="session")
def steep_curve():
    """(prior, p, model) with three interior equilibria at c = 0.25."""
    return model_from_target_curve(steep_psi, steep_psi_prime)


@pytest.fixture(scope="session")
def fast_options():
    return SolverOptions(scan_grid=512, grid_resolution=48, sequential_scan=64, policy_grid=16,
                         many_scan_grid=256, weight_grid=101)
