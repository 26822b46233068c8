"""
Base Solver Class
=================

Provides the iterate type and the common surface of every method: a solver is
constructed once per run (so factorizations and generators are owned by the
run) and then driven one ``step`` at a time by :func:`admm_quant.solvers.driver.run`.

Subclasses only need to implement ``step`` and, if the default does not fit,
``lagrangian`` and ``objective``.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict

import numpy as np

from admm_quant.discrete_sets import DiscreteProductSet
from admm_quant.errors import DimensionMismatchError
from admm_quant.objectives import SmoothObjective
from admm_quant.solvers.config import DUAL_INIT_GRADIENT, SolverConfig
from admm_quant.solvers.lagrangian import augmented_lagrangian


@dataclass
class IterateState:
    """(x, y, lambda) after ``r`` steps; ``inner_iters`` describes the last step"""

    x: np.ndarray
    y: np.ndarray
    lam: np.ndarray
    r: int = 0
    inner_iters: int = 0

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.x).all() and np.isfinite(self.y).all() and np.isfinite(self.lam).all())

    def copy(self) -> "IterateState":
        return IterateState(self.x.copy(), self.y.copy(), self.lam.copy(), self.r, self.inner_iters)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "r": self.r,
            "x": self.x.tolist(),
            "y": self.y.tolist(),
            "lambda": self.lam.tolist(),
        }


class BaseSolver(ABC):
    """
    Base class for all iterative methods.

    ``name`` is the key used on the command line and in sweep outputs.
    """

    name: str = ""
    # whether trace lagrangian/objective refer to y (ADMM family) or x (PGD)
    tracks_y: bool = True
    single_shot: bool = False

    def __init__(self, f: SmoothObjective, discrete_set: DiscreteProductSet, config: SolverConfig):
        if f.dim != discrete_set.dim:
            raise DimensionMismatchError(discrete_set.dim, f.dim, "objective")
        self.f = f
        self.discrete_set = discrete_set
        self.config = config

    def initial_state(self, x0: np.ndarray) -> IterateState:
        """x0 = y0 = x0 (already projected), lambda0 = 0 or -grad f(x0)"""
        if self.config.dual_init == DUAL_INIT_GRADIENT:
            lam = -self.f.gradient(x0)
        else:
            lam = np.zeros_like(x0)
        return IterateState(x0.copy(), x0.copy(), lam, 0, 0)

    @abstractmethod
    def step(self, state: IterateState) -> IterateState:
        """One iteration of the method"""

    def lagrangian(self, state: IterateState) -> float:
        return augmented_lagrangian(self.f, state.x, state.y, state.lam, self.config.rho)

    def objective(self, state: IterateState) -> float:
        return self.f.value(state.y if self.tracks_y else state.x)

    def dual_residual(self, state: IterateState) -> float:
        """||lambda + grad f(x)||, zero after every exact x-update"""
        return float(np.linalg.norm(state.lam + self.f.gradient(state.x)))
