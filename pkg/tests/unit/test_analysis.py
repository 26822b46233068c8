"""
Unit tests for stationarity, the enumeration oracles, parameter conditions and
run invariants
"""

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from admm_quant.analysis import (
    InvariantReport,
    brute_force_minimize,
    check_decrease_condition,
    check_dual_identity,
    check_iadmm_condition,
    check_lower_bound,
    check_monotone_lagrangian,
    check_no_worse_than_init,
    decrease_condition_value,
    enumerate_stationary_points,
    iadmm_condition_value,
    is_rho_stationary,
    is_stationary_by_definition,
    scan_stationary_window,
    trajectory_distance,
)
from admm_quant.cases import load_cases
from admm_quant.discrete_sets import (
    Binary,
    DiscreteProductSet,
    ExplicitGrid,
    ScaledLattice,
    enumerate_members,
)
from admm_quant.errors import InvalidConfigError, InvalidPointError, MismatchedRunsError
from admm_quant.objectives import QuadraticObjective
from admm_quant.seeding import make_rng
from admm_quant.solvers import SolverConfig, run
from admm_quant.solvers.driver import RunTrace, TraceRecord
from tests.conftest import random_quadratic, small_lattice


def _trace(lagrangians, f_ys=None) -> RunTrace:
    f_ys = f_ys if f_ys is not None else lagrangians
    records = [
        TraceRecord(r, lag, fy, 0.0, 0, 0.0, 0.0) for r, (lag, fy) in enumerate(zip(lagrangians, f_ys))
    ]
    return RunTrace(records=records)


class TestStationarity:
    """Test cases for the rho-stationarity check"""

    def setup_method(self):
        self.cases = load_cases("analysis", "is_rho_stationary")
        self.mixed = DiscreteProductSet([Binary(), ScaledLattice(0.5, -1.0, 1.0), ExplicitGrid((-2.0, 0.1, 3.0))])

    @pytest.mark.unit
    def test_worked_examples(self):
        for case in self.cases:
            report = is_rho_stationary(case.objective, case.discrete_set, case["x"], case["rho"])
            assert report.is_stationary is case.expected, case.description

    @pytest.mark.unit
    def test_report_serializes(self):
        f = QuadraticObjective([[1.0]], [-0.5])
        report = is_rho_stationary(f, DiscreteProductSet.lattice(1, 1.0), [0.0], 0.5)
        data = json.loads(report.to_json())
        assert data["candidate"] == [1.0]
        assert data["slack"] == pytest.approx(1.0)
        assert data["is_stationary"] is False

    @pytest.mark.unit
    def test_rejects_bad_input(self):
        f = QuadraticObjective([[1.0]], [-0.5])
        integers = DiscreteProductSet.lattice(1, 1.0)
        with pytest.raises(InvalidPointError):
            is_rho_stationary(f, integers, [0.5], 1.0)
        with pytest.raises(InvalidConfigError):
            is_rho_stationary(f, integers, [0.0], 0.0)

    @pytest.mark.unit
    def test_agrees_with_definition_on_mixed_set(self, rng):
        for _ in range(10):
            f = random_quadratic(rng, 3, psd=False)
            rho = float(rng.uniform(0.2, 5.0))
            for x in enumerate_members(self.mixed):
                fast = is_rho_stationary(f, self.mixed, x, rho).is_stationary
                assert fast == is_stationary_by_definition(f, self.mixed, x, rho)

    @pytest.mark.unit
    def test_global_minimizer_is_stationary_above_lipschitz(self, rng):
        for _ in range(10):
            f = random_quadratic(rng, 3, psd=False)
            lattice = small_lattice(3, half_width=2, v=0.5)
            argmin, _ = brute_force_minimize(f, lattice)
            for factor in (1.0, 2.0, 10.0):
                assert is_rho_stationary(f, lattice, argmin, factor * f.lipschitz_L).is_stationary

    @pytest.mark.unit
    def test_stationary_sets_grow_with_rho(self):
        lattice = small_lattice(3, half_width=2)
        for seed in range(50):
            f = random_quadratic(make_rng(seed), 3, psd=False)
            previous = set()
            for rho in np.geomspace(0.05, 50.0, 12):
                current = {tuple(p) for p in enumerate_stationary_points(f, lattice, rho)}
                assert previous <= current, f"seed {seed}, rho {rho:g}"
                previous = current
            argmin, _ = brute_force_minimize(f, lattice)
            for rho in (f.lipschitz_L, 10.0 * f.lipschitz_L):
                points = {tuple(p) for p in enumerate_stationary_points(f, lattice, rho)}
                assert tuple(argmin) in points, f"seed {seed}, rho {rho:g}"

    @pytest.mark.unit
    def test_admm_q_limit_is_stationary(self, rng):
        f = random_quadratic(rng, 4)
        lattice = DiscreteProductSet.lattice(4, 1.0)
        rho = 3.0 * f.lipschitz_L
        result = run("admm-q", f, lattice, SolverConfig(rho=rho, max_iters=2000, seed=5))
        assert result.converged
        assert is_rho_stationary(f, lattice, result.final_state.y, rho).is_stationary

    @pytest.mark.property
    @given(
        x=st.integers(min_value=-50, max_value=50),
        rho=st.floats(min_value=0.01, max_value=100.0),
        b=st.floats(min_value=-20.0, max_value=20.0),
    )
    def test_one_dimensional_closed_form(self, x, rho, b):
        # t = x - (x + b) / rho; x is stationary iff x is a nearest integer to t
        f = QuadraticObjective([[1.0]], [b])
        target = x - (x + b) / rho
        distance = abs(x - target) - abs(np.rint(target) - target)
        report = is_rho_stationary(f, DiscreteProductSet.lattice(1, 1.0), [float(x)], rho)
        if abs(distance) > 1e-6:
            assert report.is_stationary == (distance <= 0)


class TestOracles:
    """Test cases for brute force and stationary point enumeration"""

    def setup_method(self):
        self.cases = load_cases("analysis", "brute_force")
        self.no_stationary = QuadraticObjective([[1.0]], [-0.5])

    @pytest.mark.unit
    def test_brute_force_examples(self):
        for case in self.cases:
            point, value = brute_force_minimize(case.objective, case.discrete_set)
            np.testing.assert_array_equal(point, case["argmin"], err_msg=case.description)
            assert value == pytest.approx(case.expected, abs=1e-12)

    @pytest.mark.unit
    def test_brute_force_matches_value_batch_argmin(self, rng):
        f = random_quadratic(rng, 3, psd=False)
        lattice = small_lattice(3, half_width=2)
        members = enumerate_members(lattice)
        values = f.value_batch(members)
        point, value = brute_force_minimize(f, lattice)
        assert value == pytest.approx(values.min())
        np.testing.assert_array_equal(point, members[np.argmin(values)])

    @pytest.mark.unit
    def test_stationary_window_is_empty_below_threshold(self):
        integers = DiscreteProductSet.lattice(1, 1.0)
        assert scan_stationary_window(self.no_stationary, integers, 0.5, -1e6, 1e6) == []

    @pytest.mark.unit
    def test_stationary_window_at_rho_one(self):
        integers = DiscreteProductSet.lattice(1, 1.0)
        points = scan_stationary_window(self.no_stationary, integers, 1.0, -1e6, 1e6)
        assert [p.tolist() for p in points] == [[0.0], [1.0]]

    @pytest.mark.unit
    def test_window_and_rho_validation(self):
        integers = DiscreteProductSet.lattice(1, 1.0)
        with pytest.raises(InvalidConfigError):
            scan_stationary_window(self.no_stationary, integers, 1.0, 2.0, -2.0)
        with pytest.raises(InvalidConfigError):
            enumerate_stationary_points(self.no_stationary, small_lattice(1), -1.0)


class TestConditions:
    """Test cases for the parameter conditions"""

    def setup_method(self):
        self.cases = load_cases("analysis", "conditions")

    @pytest.mark.unit
    def test_worked_examples(self):
        for case in self.cases:
            if case["kind"] == "decrease":
                ok = check_decrease_condition(case["lipschitz_L"], case["mu"], case["rho"])
            else:
                ok = check_iadmm_condition(case["lipschitz_L"], case["mu"], case["rho"], case["gamma"])
            assert ok is case.expected, case.description

    @pytest.mark.unit
    def test_boundary_and_nonpositive_rho(self):
        # L^2/rho = (rho - mu)/2 at rho = sqrt(2), L = 1, mu = 0
        assert decrease_condition_value(1.0, 0.0, np.sqrt(2.0)) == pytest.approx(0.0, abs=1e-12)
        assert decrease_condition_value(1.0, 0.0, 1.0) == pytest.approx(0.5)
        assert not check_decrease_condition(1.0, 0.0, 1.0)
        assert not check_decrease_condition(1.0, 0.0, 0.0)
        assert not check_iadmm_condition(1.0, 0.0, -1.0, 0.1)

    @pytest.mark.unit
    def test_iadmm_condition_value_at_six_lipschitz(self):
        # 1/3 + 49/75 + (0.07 - 4.05) / 2
        assert iadmm_condition_value(1.0, 1.0, 6.0, 0.1) == pytest.approx(1.0 / 3.0 + 49.0 / 75.0 - 1.99)
        base = iadmm_condition_value(1.0, 1.0, 6.0, 0.1)
        assert iadmm_condition_value(2.0, 2.0, 12.0, 0.1) == pytest.approx(2.0 * base)

    @pytest.mark.property
    @given(
        lipschitz_L=st.floats(min_value=0.1, max_value=100.0),
        ratio=st.floats(min_value=0.0, max_value=1.0),
        factor=st.floats(min_value=1.0, max_value=50.0),
    )
    def test_iadmm_condition_at_zero_gamma_implies_decrease(self, lipschitz_L, ratio, factor):
        mu = ratio * lipschitz_L
        rho = factor * lipschitz_L
        if check_iadmm_condition(lipschitz_L, mu, rho, 0.0):
            assert check_decrease_condition(lipschitz_L, mu, rho)


class TestInvariants:
    """Test cases for the post-hoc run checks"""

    @pytest.mark.unit
    def test_exact_run_satisfies_descent_invariants(self, rng):
        f = random_quadratic(rng, 6)
        lattice = DiscreteProductSet.lattice(6, 0.5)
        rho = 3.0 * f.lipschitz_L
        assert check_decrease_condition(f.lipschitz_L, f.weak_convexity_mu, rho)
        result = run("admm-q", f, lattice, SolverConfig(rho=rho, max_iters=300, seed=2, init_scale=5.0))
        f_floor = f.value(f.unconstrained_minimizer())
        assert check_monotone_lagrangian(result.trace).ok
        assert check_lower_bound(result.trace, f_min=f_floor).ok
        assert check_dual_identity(result.trace).ok

    @pytest.mark.unit
    def test_violations_are_located(self):
        report = check_monotone_lagrangian(_trace([5.0, 4.0, 3.0, 3.5, 2.0]))
        assert not report.ok
        assert report.at == 3
        assert report.worst == pytest.approx(0.5 - 1e-9 * 4.0)

        report = check_lower_bound(_trace([1.0, 1.0, 0.5], f_ys=[1.0, 1.0, 0.7]))
        assert not report.ok and report.at == 2

        assert check_lower_bound(_trace([1.0, 1.0], f_ys=[1.0, 0.9]), f_min=0.95).at == 1
        assert check_monotone_lagrangian(_trace([1.0])) == InvariantReport(True)

    @pytest.mark.unit
    def test_no_worse_than_init(self):
        assert check_no_worse_than_init(_trace([3.0, 2.0, 2.5])).ok
        report = check_no_worse_than_init(_trace([3.0, 2.0, 4.0]))
        assert not report.ok and report.worst == pytest.approx(1.0 - 1e-8)

    @pytest.mark.unit
    def test_trajectory_distance(self, rng):
        f = random_quadratic(rng, 4)
        lattice = DiscreteProductSet.lattice(4, 1.0)
        config = SolverConfig(rho=2.0 * f.lipschitz_L, max_iters=40, seed=8, keep_iterates=True)
        exact = run("admm-q", f, lattice, config)
        randomized = run("admm-r", f, lattice, config.replace(mask_prob=1.0))
        assert trajectory_distance(exact.trace, randomized.trace) == 0.0

        bare = run("admm-q", f, lattice, config.replace(keep_iterates=False))
        with pytest.raises(MismatchedRunsError):
            trajectory_distance(bare.trace, exact.trace)
