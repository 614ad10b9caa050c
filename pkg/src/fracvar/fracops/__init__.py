"""Grids, fractional integrals and the Caputo derivative."""

from .operators import (
    caputo_left,
    functional_weights,
    left_operator,
    midpoint_arguments,
    lagrangian_sample,
    reconstruct,
    rl_integral_left,
    rl_integral_right_weighted,
    trajectory_points,
    weighted_functional,
    weighted_integral,
)
from .types import (
    FracTrajectory,
    Grid,
    Interval,
    Orders,
    PiecewiseSample,
    Regime,
    grading_exponent,
    make_graded_grid,
    snap_corners,
)

__all__ = [
    "FracTrajectory",
    "Grid",
    "Interval",
    "Orders",
    "PiecewiseSample",
    "Regime",
    "caputo_left",
    "functional_weights",
    "midpoint_arguments",
    "grading_exponent",
    "lagrangian_sample",
    "left_operator",
    "make_graded_grid",
    "reconstruct",
    "rl_integral_left",
    "rl_integral_right_weighted",
    "snap_corners",
    "trajectory_points",
    "weighted_functional",
    "weighted_integral",
]
