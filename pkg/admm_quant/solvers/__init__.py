"""
Solvers: ADMM-Q, I-ADMM-Q, ADMM-R, ADMM-S and the PGD / GD+Proj baselines.
"""

from admm_quant.solvers.admm import (
    admm_q_step,
    admm_r_step,
    admm_s_step,
    iadmm_q_step,
    soft_projection,
)
from admm_quant.solvers.base_solver import BaseSolver, IterateState
from admm_quant.solvers.baselines import gd_then_project, pgd_step
from admm_quant.solvers.config import InnerSolverConfig, SolverConfig
from admm_quant.solvers.driver import SOLVERS, RunResult, RunTrace, initial_point, run
from admm_quant.solvers.lagrangian import augmented_lagrangian, soft_lagrangian

__all__ = [
    "SOLVERS",
    "BaseSolver",
    "InnerSolverConfig",
    "IterateState",
    "RunResult",
    "RunTrace",
    "SolverConfig",
    "admm_q_step",
    "admm_r_step",
    "admm_s_step",
    "augmented_lagrangian",
    "gd_then_project",
    "iadmm_q_step",
    "initial_point",
    "pgd_step",
    "run",
    "soft_lagrangian",
    "soft_projection",
]
