"""
x-update of the ADMM family: minimize L(., y, lambda) over x.

For a quadratic f the minimizer solves (Q + rho I) x = rho y - lambda - b; the
Cholesky factor is computed once per run because the matrix never changes.
Otherwise gradient descent on L is used, either to a tight tolerance (exact
update) or until the inexactness certificate

    ||grad_x L(x)|| <= sigma(rho) * gamma * min(||x - y||, ||x - x_prev||)

holds, sigma(rho) = rho - mu being the strong-convexity constant of L in x.
"""

import logging
from typing import Optional, Tuple

import numpy as np
import scipy.linalg

from admm_quant.errors import InnerSolverError, InvalidConfigError, LinearSolveError
from admm_quant.objectives import QuadraticObjective, SmoothObjective
from admm_quant.solvers.config import CLOSED_FORM, InnerSolverConfig

logger = logging.getLogger(__name__)


class ClosedFormXUpdate:
    def __init__(self, f: QuadraticObjective, rho: float):
        if not isinstance(f, QuadraticObjective):
            raise InvalidConfigError("closed-form x-update requires a quadratic objective")
        self.f = f
        self.rho = rho
        system = f.Q + rho * np.eye(f.dim)
        try:
            self._factor = scipy.linalg.cho_factor(system, check_finite=False)
        except np.linalg.LinAlgError as exc:
            raise LinearSolveError(
                f"Q + rho*I is not positive definite for rho={rho:g} (need rho > mu)"
            ) from exc

    def solve(
        self, y: np.ndarray, lam: np.ndarray, x_prev: np.ndarray, gamma: Optional[float] = None
    ) -> Tuple[np.ndarray, int]:
        rhs = self.rho * y - lam - self.f.b
        return scipy.linalg.cho_solve(self._factor, rhs, check_finite=False), 0


class GradientXUpdate:
    def __init__(self, f: SmoothObjective, rho: float, inner: InnerSolverConfig):
        self.f = f
        self.rho = rho
        self.inner = inner
        self.sigma = rho - f.weak_convexity_mu
        if self.sigma <= 0:
            raise LinearSolveError(
                f"L(., y, lambda) is not strongly convex for rho={rho:g} <= mu={f.weak_convexity_mu:g}"
            )
        self.step = inner.resolve_step(f.lipschitz_L, f.weak_convexity_mu, rho)

    def lagrangian_gradient(self, x: np.ndarray, y: np.ndarray, lam: np.ndarray) -> np.ndarray:
        return self.f.gradient(x) + lam + self.rho * (x - y)

    def accepts(
        self,
        x: np.ndarray,
        grad_norm: float,
        y: np.ndarray,
        lam: np.ndarray,
        x_prev: np.ndarray,
        gamma: Optional[float],
    ) -> bool:
        if grad_norm <= self.inner.abs_grad_tol:
            return True
        if gamma is None:
            return grad_norm <= self.inner.tol * (1.0 + float(np.linalg.norm(lam)))
        bound = min(np.linalg.norm(x - y), np.linalg.norm(x - x_prev))
        return grad_norm <= self.sigma * gamma * bound

    def solve(
        self, y: np.ndarray, lam: np.ndarray, x_prev: np.ndarray, gamma: Optional[float] = None
    ) -> Tuple[np.ndarray, int]:
        """Warm-started GD; ``gamma=None`` asks for the exact minimizer"""
        x = x_prev.copy()
        grad_norm = float("inf")
        for iteration in range(self.inner.max_inner_iters + 1):
            grad = self.lagrangian_gradient(x, y, lam)
            grad_norm = float(np.linalg.norm(grad))
            if not np.isfinite(grad_norm):
                break
            if self.accepts(x, grad_norm, y, lam, x_prev, gamma):
                return x, iteration
            x = x - self.step * grad
        raise InnerSolverError(
            f"inner GD stopped after {self.inner.max_inner_iters} iterations "
            f"with ||grad L|| = {grad_norm:.3e}",
            self.inner.max_inner_iters,
            grad_norm,
        )


def make_x_update(f: SmoothObjective, rho: float, inner: InnerSolverConfig):
    if inner.mode == CLOSED_FORM:
        return ClosedFormXUpdate(f, rho)
    return GradientXUpdate(f, rho, inner)
