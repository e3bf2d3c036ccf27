"""Pose refinement: conjugate-gradient ascent, multi-start search, dynamics, sweeps."""

from .cg import CGResult, LineSearch, cg_maximize, fd_gradient
from .dynamics import SimParams, State, Trajectory, dynamics_simulate, simulate
from .multistart import (
    SearchConfig,
    SearchEntry,
    SearchResult,
    multistart_search,
    sample_starts,
    search_fields,
)
from .sweep import SweepRow, loglog_slope, parameter_sweep, relax, write_sweep_csv

__all__ = [
    "CGResult", "LineSearch", "SearchConfig", "SearchEntry", "SearchResult", "SimParams",
    "State", "SweepRow", "Trajectory", "cg_maximize", "dynamics_simulate", "fd_gradient",
    "loglog_slope", "multistart_search", "parameter_sweep", "relax", "sample_starts",
    "search_fields", "simulate", "write_sweep_csv",
]
