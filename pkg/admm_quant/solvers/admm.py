"""
ADMM Methods
============

Single-step transitions of the four ADMM variants for

    min f(x)  s.t.  x in A,   split as  x = y,  y in A

Each step updates y first (projection-based), then x (minimizing the augmented
Lagrangian), then takes a dual ascent step lambda += rho (x - y):

* ADMM-Q    y = P_A(x + lambda/rho)
* I-ADMM-Q  as ADMM-Q, but x only needs to pass the inexactness certificate
* ADMM-R    only coordinates selected by a Bernoulli mask take the projection
* ADMM-S    y is the prox of beta * dist(., A): a move of length beta/rho
            towards P_A(z) unless that overshoots it
"""

import logging
from typing import Optional

import numpy as np

from admm_quant.discrete_sets import DiscreteProductSet
from admm_quant.objectives import SmoothObjective
from admm_quant.seeding import MASK_STREAM, make_rng
from admm_quant.solvers.base_solver import BaseSolver, IterateState
from admm_quant.solvers.config import GRADIENT_DESCENT, InnerSolverConfig, SolverConfig
from admm_quant.solvers.lagrangian import soft_lagrangian
from admm_quant.solvers.x_update import GradientXUpdate, make_x_update

logger = logging.getLogger(__name__)


def _finish_step(state: IterateState, y_new: np.ndarray, x_update, rho: float, gamma=None) -> IterateState:
    x_new, inner_iters = x_update.solve(y_new, state.lam, state.x, gamma)
    lam_new = state.lam + rho * (x_new - y_new)
    return IterateState(x_new, y_new, lam_new, state.r + 1, inner_iters)


def admm_q_step(
    f: SmoothObjective,
    discrete_set: DiscreteProductSet,
    state: IterateState,
    rho: float,
    inner: Optional[InnerSolverConfig] = None,
    x_update=None,
) -> IterateState:
    if x_update is None:
        x_update = make_x_update(f, rho, inner or InnerSolverConfig())
    y_new = discrete_set.project_unchecked(state.x + state.lam / rho)
    return _finish_step(state, y_new, x_update, rho)


def iadmm_q_step(
    f: SmoothObjective,
    discrete_set: DiscreteProductSet,
    state: IterateState,
    rho: float,
    gamma: float,
    inner: Optional[InnerSolverConfig] = None,
    x_update: Optional[GradientXUpdate] = None,
) -> IterateState:
    if x_update is None:
        x_update = GradientXUpdate(f, rho, inner or InnerSolverConfig(mode=GRADIENT_DESCENT))
    y_new = discrete_set.project_unchecked(state.x + state.lam / rho)
    return _finish_step(state, y_new, x_update, rho, gamma=gamma)


def admm_r_step(
    f: SmoothObjective,
    discrete_set: DiscreteProductSet,
    state: IterateState,
    rho: float,
    mask_prob: float,
    rng: np.random.Generator,
    inner: Optional[InnerSolverConfig] = None,
    x_update=None,
) -> IterateState:
    if x_update is None:
        x_update = make_x_update(f, rho, inner or InnerSolverConfig())
    y_hat = discrete_set.project_unchecked(state.x + state.lam / rho)
    mask = rng.random(discrete_set.dim) < mask_prob
    y_new = np.where(mask, y_hat, state.y)
    return _finish_step(state, y_new, x_update, rho)


def soft_projection(discrete_set: DiscreteProductSet, z: np.ndarray, rho: float, beta: float) -> np.ndarray:
    """argmin_y 1/2 ||y - z||^2 + (beta/rho) ||y - P_A(z)||"""
    z_tilde = discrete_set.project_unchecked(z)
    z_d = z_tilde - z
    gap = float(np.linalg.norm(z_d))
    reach = beta / rho
    if gap == 0.0 or reach > gap:
        return z_tilde
    return z + reach * z_d / gap


def admm_s_step(
    f: SmoothObjective,
    discrete_set: DiscreteProductSet,
    state: IterateState,
    rho: float,
    beta: float,
    inner: Optional[InnerSolverConfig] = None,
    x_update=None,
) -> IterateState:
    if x_update is None:
        x_update = make_x_update(f, rho, inner or InnerSolverConfig())
    y_new = soft_projection(discrete_set, state.x + state.lam / rho, rho, beta)
    return _finish_step(state, y_new, x_update, rho)


class AdmmQSolver(BaseSolver):
    """ADMM with exact projection onto A"""

    name = "admm-q"

    def __init__(self, f: SmoothObjective, discrete_set: DiscreteProductSet, config: SolverConfig):
        super().__init__(f, discrete_set, config)
        self.x_update = self._make_x_update()

    def _make_x_update(self):
        return make_x_update(self.f, self.config.rho, self.config.inner)

    def step(self, state: IterateState) -> IterateState:
        return admm_q_step(self.f, self.discrete_set, state, self.config.rho, x_update=self.x_update)


class InexactAdmmQSolver(AdmmQSolver):
    """ADMM-Q whose x-update stops as soon as the certificate holds"""

    name = "iadmm-q"

    def _make_x_update(self):
        # the inexact variant is defined through an iterative inner solver
        return GradientXUpdate(self.f, self.config.rho, self.config.inner)

    def step(self, state: IterateState) -> IterateState:
        return iadmm_q_step(
            self.f,
            self.discrete_set,
            state,
            self.config.rho,
            self.config.gamma,
            x_update=self.x_update,
        )


class RandomizedAdmmSolver(AdmmQSolver):
    """ADMM-R: Bernoulli(mask_prob) coordinates refresh y each iteration"""

    name = "admm-r"

    def __init__(self, f: SmoothObjective, discrete_set: DiscreteProductSet, config: SolverConfig):
        super().__init__(f, discrete_set, config)
        self.rng = make_rng(config.seed, MASK_STREAM)

    def step(self, state: IterateState) -> IterateState:
        return admm_r_step(
            self.f,
            self.discrete_set,
            state,
            self.config.rho,
            self.config.mask_prob,
            self.rng,
            x_update=self.x_update,
        )


class SoftAdmmSolver(AdmmQSolver):
    """ADMM-S: soft projection, y may leave A but stays within beta/rho of P_A"""

    name = "admm-s"

    def step(self, state: IterateState) -> IterateState:
        return admm_s_step(
            self.f, self.discrete_set, state, self.config.rho, self.config.beta, x_update=self.x_update
        )

    def lagrangian(self, state: IterateState) -> float:
        return soft_lagrangian(
            self.f, self.discrete_set, state.x, state.y, state.lam, self.config.rho, self.config.beta
        )
