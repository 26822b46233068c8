"""
Post-hoc checks over recorded runs.

Each check returns an :class:`InvariantReport` instead of raising, so callers
(tests, the CLI, the logistic demo) decide what a violation means for them.
Checks only see the recorded iterations; with ``trace_stride > 1`` a
monotonicity check compares consecutive recorded values.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from admm_quant.errors import MismatchedRunsError
from admm_quant.solvers.driver import RunTrace


@dataclass
class InvariantReport:
    ok: bool
    # largest violation seen, 0.0 when none
    worst: float = 0.0
    # iteration of the worst violation
    at: Optional[int] = None


def _report(violations: np.ndarray, iterations: np.ndarray) -> InvariantReport:
    if violations.size == 0:
        return InvariantReport(True)
    k = int(np.argmax(violations))
    worst = float(violations[k])
    if worst <= 0:
        return InvariantReport(True)
    return InvariantReport(False, worst, int(iterations[k]))


def check_monotone_lagrangian(
    trace: RunTrace, rel_slack: float = 1e-9, start: int = 1
) -> InvariantReport:
    """L(r+1) <= L(r) + rel_slack * (1 + |L(r)|) for recorded r >= start"""
    r = trace.iterations
    values = trace.column("lagrangian")[r >= start]
    r = r[r >= start]
    if values.size < 2:
        return InvariantReport(True)
    increase = values[1:] - values[:-1] - rel_slack * (1.0 + np.abs(values[:-1]))
    return _report(increase, r[1:])


def check_lower_bound(
    trace: RunTrace, f_min: Optional[float] = None, rel_slack: float = 1e-9, start: int = 1
) -> InvariantReport:
    """L(r) >= f(y(r)) and, when given, f(y(r)) >= f_min, for recorded r >= start"""
    r = trace.iterations
    mask = r >= start
    lag = trace.column("lagrangian")[mask]
    f_y = trace.column("f_y")[mask]
    violations = f_y - lag - rel_slack * (1.0 + np.abs(f_y))
    if f_min is not None:
        below = f_min - f_y - rel_slack * (1.0 + abs(f_min))
        violations = np.maximum(violations, below)
    return _report(violations, r[mask])


def check_dual_identity(trace: RunTrace, tol: float = 1e-8, start: int = 1) -> InvariantReport:
    """||lambda + grad f(x)|| <= tol (1 + ||lambda||) after every exact x-update"""
    r = trace.iterations
    mask = r >= start
    residual = trace.column("dual_residual")[mask]
    bound = tol * (1.0 + trace.column("lam_norm")[mask])
    return _report(residual - bound, r[mask])


def check_no_worse_than_init(trace: RunTrace, slack: float = 1e-8) -> InvariantReport:
    """f(y_final) <= f(y0) + slack"""
    first, last = trace.records[0], trace.records[-1]
    excess = last.f_y - first.f_y - slack
    return InvariantReport(excess <= 0, max(excess, 0.0), last.r if excess > 0 else None)


def trajectory_distance(trace_a: RunTrace, trace_b: RunTrace) -> float:
    """
    Largest coordinate difference of (x, y, lambda) between two runs.

    Both runs must have been recorded with ``keep_iterates`` at the same iterations.
    """
    if not trace_a.iterates or len(trace_a.iterates) != len(trace_b.iterates):
        raise MismatchedRunsError("both traces need the same number of stored iterates")
    worst = 0.0
    for a, b in zip(trace_a.iterates, trace_b.iterates):
        if a.r != b.r:
            raise MismatchedRunsError(f"iterate r={a.r} paired with r={b.r}")
        for u, v in ((a.x, b.x), (a.y, b.y), (a.lam, b.lam)):
            worst = max(worst, float(np.max(np.abs(u - v))))
    return worst
