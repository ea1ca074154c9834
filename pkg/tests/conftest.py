"""Shared fixtures: fresh settings per test and seeded generators."""

import numpy as np
import pytest

from fracpoisson.config import override_settings
from fracpoisson.schemas.params import FracParams
from fracpoisson.schemas.ruin import ExponentialClaims, RuinModel


@pytest.fixture(autouse=True)
def fresh_settings():
    """Every test starts from the environment defaults."""
    settings = override_settings()
    yield settings
    override_settings()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def classical_model() -> RuinModel:
    """nu = h = lambda = mu = 1, c = 2: Lundberg root 0.5."""
    return RuinModel(frac=FracParams(nu=1.0, h=1.0, lam=1.0), c=2.0, claims=ExponentialClaims(mu=1.0))


@pytest.fixture
def fractional_model() -> RuinModel:
    """nu = 1/2, h = lambda = mu = c = 1: Lundberg root ((sqrt 5 - 1)/2)^2."""
    return RuinModel(frac=FracParams(nu=0.5, h=1.0, lam=1.0), c=1.0, claims=ExponentialClaims(mu=1.0))
