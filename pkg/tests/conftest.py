import numpy as np
import pytest

from climattn import CostSpec, PriorScaleFamily, StakesSpec


@pytest.fixture
def default_model():
    """The calibrated stakes/prior/cost triple used across the suite."""
    stakes = StakesSpec(q=0.5, sigma_sq=1.0, a=0.02, b=700.0)
    prior = PriorScaleFamily.lognormal(theta=0.05, log_sd=0.5)
    cost = CostSpec(kappa=18.0)
    return stakes, prior, cost


@pytest.fixture
def unit_model():
    """Point-mass model with unit coefficients; every quantity is closed form."""
    stakes = StakesSpec(q=0.5, sigma_sq=1.0, a=1.0, b=1.0)
    prior = PriorScaleFamily.point_mass(theta=1.0)
    cost = CostSpec(kappa=2.0)
    return stakes, prior, cost


@pytest.fixture
def rng():
    return np.random.default_rng(20240901)
