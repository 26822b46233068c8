"""Augmented Lagrangians of the ADMM family."""

import numpy as np

from admm_quant.discrete_sets import DiscreteProductSet, soft_indicator
from admm_quant.objectives import SmoothObjective


def augmented_lagrangian(
    f: SmoothObjective, x: np.ndarray, y: np.ndarray, lam: np.ndarray, rho: float
) -> float:
    """
    f(x) + <lambda, x - y> + rho/2 ||x - y||^2

    The indicator of A is omitted: callers evaluate it at y in A, where it is 0.
    """
    f.check_dim(y, "y")
    f.check_dim(lam, "lambda")
    gap = x - y
    return f.value(x) + float(lam @ gap) + 0.5 * rho * float(gap @ gap)


def soft_lagrangian(
    f: SmoothObjective,
    discrete_set: DiscreteProductSet,
    x: np.ndarray,
    y: np.ndarray,
    lam: np.ndarray,
    rho: float,
    beta: float,
) -> float:
    """Augmented Lagrangian with the hard indicator replaced by beta * dist(y, A)"""
    return augmented_lagrangian(f, x, y, lam, rho) + beta * soft_indicator(discrete_set, y)
