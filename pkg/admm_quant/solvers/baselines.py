"""
Baseline methods: projected gradient descent and GD followed by one projection.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from admm_quant.discrete_sets import DiscreteProductSet
from admm_quant.objectives import QuadraticObjective, SmoothObjective
from admm_quant.solvers.base_solver import BaseSolver, IterateState
from admm_quant.solvers.config import SolverConfig

logger = logging.getLogger(__name__)


def pgd_step(f: SmoothObjective, discrete_set: DiscreteProductSet, x: np.ndarray, rho: float) -> np.ndarray:
    """x+ = P_A(x - grad f(x) / rho)"""
    x = discrete_set.check_vector(x)
    return discrete_set.project_unchecked(x - f.gradient(x) / rho)


@dataclass
class GDProjectResult:
    point: np.ndarray
    unconstrained: np.ndarray
    converged: bool
    iterations: int


def gd_then_project(
    f: SmoothObjective,
    discrete_set: DiscreteProductSet,
    x0: Optional[np.ndarray] = None,
    tol: float = 1e-8,
    max_iters: int = 100000,
) -> GDProjectResult:
    """
    Minimize f without constraints, then project once onto A.

    A quadratic with positive definite Q is solved directly; anything else runs
    gradient descent with step 1/L_f from x0 until ||grad f|| <= tol. Hitting the
    cap is not an error: the result comes back with ``converged=False``.
    """
    if isinstance(f, QuadraticObjective):
        direct = f.unconstrained_minimizer()
        if direct is not None:
            return GDProjectResult(discrete_set.project_unchecked(direct), direct, True, 0)
    x = np.zeros(f.dim) if x0 is None else np.array(x0, dtype=float)
    step = 1.0 / f.lipschitz_L
    converged = False
    iterations = 0
    with np.errstate(over="ignore", invalid="ignore"):
        for iterations in range(1, max_iters + 1):
            grad = f.gradient(x)
            grad_norm = np.linalg.norm(grad)
            if grad_norm <= tol:
                converged = True
                break
            if not np.isfinite(grad_norm):
                break
            x = x - step * grad
    if not converged:
        logger.warning(
            "GD+Proj: gradient descent stopped after %d iterations without reaching tol=%g",
            iterations,
            tol,
        )
    if not np.all(np.isfinite(x)):
        return GDProjectResult(x, x, False, iterations)
    return GDProjectResult(discrete_set.project_unchecked(x), x, converged, iterations)


class PgdSolver(BaseSolver):
    """Projected gradient descent with step 1/rho; the state keeps x = y, lambda = 0"""

    name = "pgd"
    tracks_y = False

    def initial_state(self, x0: np.ndarray) -> IterateState:
        return IterateState(x0.copy(), x0.copy(), np.zeros_like(x0), 0, 0)

    def step(self, state: IterateState) -> IterateState:
        x_new = self.discrete_set.project_unchecked(state.x - self.f.gradient(state.x) / self.config.rho)
        return IterateState(x_new, x_new, state.lam, state.r + 1, 0)

    def lagrangian(self, state: IterateState) -> float:
        return self.f.value(state.x)

    def dual_residual(self, state: IterateState) -> float:
        return 0.0


class GdProjectSolver(BaseSolver):
    """Not iterative: the driver calls ``step`` exactly once"""

    name = "gd-proj"
    tracks_y = False
    single_shot = True

    def __init__(self, f: SmoothObjective, discrete_set: DiscreteProductSet, config: SolverConfig):
        super().__init__(f, discrete_set, config)
        self.last_result: Optional[GDProjectResult] = None

    def initial_state(self, x0: np.ndarray) -> IterateState:
        return IterateState(x0.copy(), x0.copy(), np.zeros_like(x0), 0, 0)

    def solve(self, state: IterateState) -> GDProjectResult:
        return gd_then_project(
            self.f, self.discrete_set, state.x, self.config.gd_tol, self.config.gd_max_iters
        )

    def step(self, state: IterateState) -> IterateState:
        result = self.solve(state)
        self.last_result = result
        return IterateState(result.point, result.point.copy(), state.lam, state.r + 1, result.iterations)

    def lagrangian(self, state: IterateState) -> float:
        return self.f.value(state.x)

    def dual_residual(self, state: IterateState) -> float:
        return 0.0
