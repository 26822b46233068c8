"""
Verification instruments: stationarity, enumeration oracles, parameter
conditions and trace invariants.
"""

from admm_quant.analysis.conditions import (
    check_decrease_condition,
    check_iadmm_condition,
    decrease_condition_value,
    iadmm_condition_value,
)
from admm_quant.analysis.invariants import (
    InvariantReport,
    check_dual_identity,
    check_lower_bound,
    check_monotone_lagrangian,
    check_no_worse_than_init,
    trajectory_distance,
)
from admm_quant.analysis.oracle import (
    brute_force_minimize,
    enumerate_stationary_points,
    is_stationary_by_definition,
    scan_stationary_window,
)
from admm_quant.analysis.stationarity import StationarityReport, is_rho_stationary

__all__ = [
    "InvariantReport",
    "StationarityReport",
    "brute_force_minimize",
    "check_decrease_condition",
    "check_dual_identity",
    "check_iadmm_condition",
    "check_lower_bound",
    "check_monotone_lagrangian",
    "check_no_worse_than_init",
    "decrease_condition_value",
    "enumerate_stationary_points",
    "iadmm_condition_value",
    "is_rho_stationary",
    "is_stationary_by_definition",
    "scan_stationary_window",
    "trajectory_distance",
]
