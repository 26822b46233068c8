"""
Enumeration Oracles
===================

Exhaustive answers over finite sets, used to validate the iterative methods:
the global minimizer, the full set of rho-stationary points, and a direct
evaluation of the stationarity definition.

Members are streamed in lexicographic blocks so memory stays bounded by the
block size whatever the cardinality (up to ``limit``).
"""

import logging
from typing import Any, List, Tuple

import numpy as np

from admm_quant.discrete_sets import (
    DEFAULT_ENUMERATION_LIMIT,
    DiscreteProductSet,
    iter_member_blocks,
)
from admm_quant.errors import InvalidConfigError
from admm_quant.objectives import SmoothObjective
from admm_quant.analysis.stationarity import DEFAULT_TOLERANCE, stationarity_gaps

logger = logging.getLogger(__name__)


def brute_force_minimize(
    f: SmoothObjective,
    discrete_set: DiscreteProductSet,
    limit: int = DEFAULT_ENUMERATION_LIMIT,
) -> Tuple[np.ndarray, float]:
    """Global minimizer over A; ties go to the lexicographically smallest member"""
    best_point = None
    best_value = np.inf
    for block in iter_member_blocks(discrete_set, limit):
        values = f.value_batch(block)
        # argmin returns the first (lexicographically smallest) occurrence
        k = int(np.argmin(values))
        if best_point is None or values[k] < best_value:
            best_point = block[k].copy()
            best_value = float(values[k])
    logger.debug("brute force over %d members: f=%.12g", int(discrete_set.cardinality), best_value)
    return best_point, best_value


def enumerate_stationary_points(
    f: SmoothObjective,
    discrete_set: DiscreteProductSet,
    rho: float,
    tol: float = DEFAULT_TOLERANCE,
    limit: int = DEFAULT_ENUMERATION_LIMIT,
) -> List[np.ndarray]:
    """Every rho-stationary member of A, in lexicographic order"""
    if not rho > 0:
        raise InvalidConfigError("rho must be positive")
    found: List[np.ndarray] = []
    for block in iter_member_blocks(discrete_set, limit):
        keep = stationarity_gaps(f, discrete_set, block, rho) <= tol
        found.extend(block[keep])
    return found


def scan_stationary_window(
    f: SmoothObjective,
    discrete_set: DiscreteProductSet,
    rho: float,
    lo: float,
    hi: float,
    tol: float = DEFAULT_TOLERANCE,
    limit: int = DEFAULT_ENUMERATION_LIMIT,
) -> List[np.ndarray]:
    """
    Stationary points of a lattice set inside the box [lo, hi]^d.

    Unbounded lattices cannot be enumerated; this scans a window instead. For a
    coercive f, |grad f| keeps growing outside a large enough window, so points
    beyond it are not stationary either.
    """
    if not lo <= hi:
        raise InvalidConfigError("window needs lo <= hi")
    return enumerate_stationary_points(f, discrete_set.with_bounds(lo, hi), rho, tol, limit)


def is_stationary_by_definition(
    f: SmoothObjective,
    discrete_set: DiscreteProductSet,
    x: Any,
    rho: float,
    tol: float = DEFAULT_TOLERANCE,
    limit: int = 10**4,
) -> bool:
    """||x - t|| <= min over all members a of ||a - t|| + tol, by full enumeration"""
    x = discrete_set.check_vector(x)
    target = x - f.gradient(x) / rho
    best = np.inf
    for block in iter_member_blocks(discrete_set, limit):
        best = min(best, float(np.min(np.linalg.norm(block - target, axis=1))))
    return float(np.linalg.norm(x - target)) <= best + tol
