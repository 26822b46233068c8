"""
Rho-stationarity
================

x in A is rho-stationary when it belongs to the argmin over A of
||a - t||, t = x - grad f(x) / rho. Because A is a product set the argmin is
itself a product of per-coordinate argmin sets, so the test is coordinate-wise:

    |x_i - t_i| <= min_a |a_i - t_i| + tol   for every i

This is set membership, not equality with the tie-broken projection: at an
exact tie both nearest members are stationary.
"""

import json
from dataclasses import asdict, dataclass
from typing import Any, Dict

import numpy as np

from admm_quant.discrete_sets import DiscreteProductSet
from admm_quant.errors import InvalidConfigError, InvalidPointError
from admm_quant.objectives import SmoothObjective

DEFAULT_TOLERANCE = 1e-9


@dataclass
class StationarityReport:
    is_stationary: bool
    # P_A(x - grad f(x) / rho)
    candidate: np.ndarray
    # max_i (|x_i - t_i| - min_a |a_i - t_i|); <= tol exactly when stationary
    slack: float
    tolerance: float

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["candidate"] = self.candidate.tolist()
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def stationarity_gaps(
    f: SmoothObjective, discrete_set: DiscreteProductSet, points: np.ndarray, rho: float
) -> np.ndarray:
    """
    Per-point worst coordinate gap for an (n, dim) batch of members of A.

    A point is rho-stationary iff its gap is <= tol.
    """
    targets = points - f.gradient_batch(points) / rho
    nearest = discrete_set.project_unchecked(targets)
    gaps = np.abs(points - targets) - np.abs(nearest - targets)
    return gaps.max(axis=1)


def is_rho_stationary(
    f: SmoothObjective,
    discrete_set: DiscreteProductSet,
    x: Any,
    rho: float,
    tol: float = DEFAULT_TOLERANCE,
) -> StationarityReport:
    if not rho > 0:
        raise InvalidConfigError("rho must be positive")
    x = discrete_set.check_vector(x)
    if not np.all(np.abs(discrete_set.project_unchecked(x) - x) <= tol):
        raise InvalidPointError("x is not a member of the set")
    target = x - f.gradient(x) / rho
    candidate = discrete_set.project_unchecked(target)
    slack = float(np.max(np.abs(x - target) - np.abs(candidate - target)))
    return StationarityReport(slack <= tol, candidate, slack, tol)
