"""
Shared test helpers
"""

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from admm_quant.discrete_sets import DiscreteProductSet
from admm_quant.objectives import QuadraticObjective

settings.register_profile(
    "default", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def random_quadratic(rng: np.random.Generator, d: int, psd: bool = True, scale: float = 1.0) -> QuadraticObjective:
    """Q = G'G (+ noise if indefinite), b ~ N(0, scale^2 d)"""
    g = rng.standard_normal((d, d))
    Q = g.T @ g if psd else 0.5 * (g + g.T)
    b = rng.normal(0.0, scale * np.sqrt(d), d)
    return QuadraticObjective(Q, b)


def small_lattice(d: int, half_width: int = 3, v: float = 1.0) -> DiscreteProductSet:
    return DiscreteProductSet.lattice(d, v, -half_width * v, half_width * v)


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(12345))
