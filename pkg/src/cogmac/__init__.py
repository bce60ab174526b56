"""Water-filling power control and threshold scheduling for cognitive
multiple-access networks under average power and interference budgets."""

from .config import NetworkConfig, db_to_linear
from .dual import ConstraintBudget, expected_interference, expected_power, solve_duals
from .errors import InfeasibleError, NumericalError, SolverError
from .fading import ClassCTail, FadingModel, Family, origin_ratio, tail_ratio
from .oracle import (closed_form_objective, closed_form_policy, discretize,
                     optimality_gap, solve_relaxed)
from .policy import (DualSolution, eta_from_threshold, instantaneous_rate,
                     ratio_quantile, schedule, waterfill)
from .sim import estimate, estimate_orderstat, run_slot, simulate_slots
from .sweep import SweepRow, asymptote, rate_decomposition, read_csv, sweep, write_csv

__all__ = [
    "ClassCTail", "ConstraintBudget", "DualSolution", "FadingModel", "Family",
    "InfeasibleError", "NetworkConfig", "NumericalError", "SolverError", "SweepRow",
    "asymptote", "closed_form_objective", "closed_form_policy", "db_to_linear",
    "discretize", "estimate", "estimate_orderstat", "eta_from_threshold",
    "expected_interference", "expected_power", "instantaneous_rate", "optimality_gap",
    "origin_ratio", "rate_decomposition", "ratio_quantile", "read_csv", "run_slot",
    "schedule", "simulate_slots", "solve_duals", "solve_relaxed", "sweep", "tail_ratio",
    "waterfill", "write_csv",
]
