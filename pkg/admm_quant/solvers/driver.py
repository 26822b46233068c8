"""
Run Driver
==========

Runs one method for ``max_iters`` steps from a feasible start, records a thinned
trace and reports the best objective over the last ``window`` iterations.

A run is single-threaded and owns all of its state (solver, factorizations,
random streams), so any number of runs can execute in parallel workers.
"""

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Type, Union

import numpy as np

from admm_quant.discrete_sets import DiscreteProductSet
from admm_quant.errors import DivergenceError, InvalidConfigError
from admm_quant.objectives import SmoothObjective
from admm_quant.seeding import INIT_STREAM, make_rng
from admm_quant.solvers.admm import (
    AdmmQSolver,
    InexactAdmmQSolver,
    RandomizedAdmmSolver,
    SoftAdmmSolver,
)
from admm_quant.solvers.base_solver import BaseSolver, IterateState
from admm_quant.solvers.baselines import GdProjectSolver, PgdSolver
from admm_quant.solvers.config import SolverConfig

logger = logging.getLogger(__name__)

SOLVERS: Dict[str, Type[BaseSolver]] = {
    cls.name: cls
    for cls in (
        AdmmQSolver,
        InexactAdmmQSolver,
        RandomizedAdmmSolver,
        SoftAdmmSolver,
        PgdSolver,
        GdProjectSolver,
    )
}

TRACE_HEADER = ("r", "lagrangian", "f_y", "residual", "inner_iters")

# a run counts as converged once x moves less than this (relative) and y
# stays put for CONVERGED_AFTER consecutive iterations
CONVERGENCE_STEP_TOL = 1e-10
CONVERGED_AFTER = 50


@dataclass
class TraceRecord:
    r: int
    lagrangian: float
    f_y: float
    residual: float
    inner_iters: int
    dual_residual: float
    lam_norm: float


@dataclass
class RunTrace:
    stride: int = 1
    records: List[TraceRecord] = field(default_factory=list)
    # (x, y, lambda) copies at the recorded iterations when keep_iterates is set
    iterates: List[IterateState] = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(rec, name) for rec in self.records])

    @property
    def iterations(self) -> np.ndarray:
        return self.column("r")

    def to_csv(self, path: Union[str, Path]) -> None:
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(TRACE_HEADER)
            for rec in self.records:
                writer.writerow(
                    [
                        rec.r,
                        f"{rec.lagrangian:.12g}",
                        f"{rec.f_y:.12g}",
                        f"{rec.residual:.12g}",
                        rec.inner_iters,
                    ]
                )


@dataclass
class RunResult:
    method: str
    trace: RunTrace
    final_state: IterateState
    best_window_objective: float
    initial_point: np.ndarray
    converged: bool
    # GD+Proj only: whether gradient descent met its tolerance
    gd_converged: Optional[bool] = None

    def final_state_json(self) -> str:
        data = self.final_state.to_dict()
        data.update(
            method=self.method,
            best_window_objective=self.best_window_objective,
            converged=self.converged,
        )
        return json.dumps(data, indent=2)


def initial_point(
    discrete_set: DiscreteProductSet, rng: np.random.Generator, scale: Optional[float] = None
) -> np.ndarray:
    """x0 = P_A(z), z_i ~ N(0, s^2), s defaulting to the set's spacing"""
    s = discrete_set.default_scale() if scale is None else scale
    return discrete_set.project_unchecked(rng.normal(0.0, s, discrete_set.dim))


def make_solver(
    method: str, f: SmoothObjective, discrete_set: DiscreteProductSet, config: SolverConfig
) -> BaseSolver:
    try:
        solver_cls = SOLVERS[method]
    except KeyError:
        raise InvalidConfigError(f"unknown method {method!r}; choose from {sorted(SOLVERS)}") from None
    return solver_cls(f, discrete_set, config)


def _record(solver: BaseSolver, state: IterateState, trace: RunTrace, keep: bool) -> None:
    trace.records.append(
        TraceRecord(
            r=state.r,
            lagrangian=solver.lagrangian(state),
            f_y=solver.objective(state),
            residual=float(np.linalg.norm(state.x - state.y)),
            inner_iters=state.inner_iters,
            dual_residual=solver.dual_residual(state),
            lam_norm=float(np.linalg.norm(state.lam)),
        )
    )
    if keep:
        trace.iterates.append(state.copy())


def run(
    method: str,
    f: SmoothObjective,
    discrete_set: DiscreteProductSet,
    config: SolverConfig,
    x0: Optional[np.ndarray] = None,
) -> RunResult:
    """
    Iterate ``method`` ``config.max_iters`` times.

    ``x0`` (a member of A) is shared between algorithms by the experiment
    harness; when omitted it is drawn from the run's own seeded stream.
    Raises :class:`DivergenceError` as soon as an iterate stops being finite.
    """
    solver = make_solver(method, f, discrete_set, config)
    if x0 is None:
        x0 = initial_point(discrete_set, make_rng(config.seed, INIT_STREAM), config.init_scale)
    else:
        x0 = discrete_set.project_unchecked(discrete_set.check_vector(x0, "x0"))
    state = solver.initial_state(x0)
    trace = RunTrace(stride=config.trace_stride)
    keep = config.keep_iterates
    last_iter = 1 if solver.single_shot else config.max_iters
    # a single-shot method is judged on its own output only
    window_start = last_iter if solver.single_shot else last_iter - config.window + 1
    window_values: List[float] = []

    logger.debug("run %s: rho=%g iters=%d dim=%d", method, config.rho, last_iter, f.dim)
    _record(solver, state, trace, keep)
    if window_start <= 0:
        window_values.append(solver.objective(state))

    stable = 0
    gd_converged = None
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for r in range(1, last_iter + 1):
            previous = state
            state = solver.step(state)
            if not state.is_finite():
                logger.info("%s diverged at iteration %d (rho=%g)", method, r, config.rho)
                raise DivergenceError(method, r, state)
            moved = np.linalg.norm(state.x - previous.x)
            if moved <= CONVERGENCE_STEP_TOL * (1.0 + np.linalg.norm(state.x)) and np.array_equal(
                state.y, previous.y
            ):
                stable += 1
            else:
                stable = 0
            if r >= window_start:
                window_values.append(solver.objective(state))
            if r % config.trace_stride == 0 or r == last_iter:
                _record(solver, state, trace, keep)

    if solver.single_shot:
        gd_converged = solver.last_result.converged if solver.last_result else None
        converged = bool(gd_converged)
    else:
        converged = stable >= CONVERGED_AFTER
    best = min(window_values) if window_values else solver.objective(state)
    if not math.isfinite(best):
        raise DivergenceError(method, last_iter, state)
    logger.debug("run %s finished: best=%.12g converged=%s", method, best, converged)
    return RunResult(method, trace, state, best, x0, converged, gd_converged)
