"""Worked examples with known candidate trajectories.

* ``example1``: ``L = y^5 + |y|``, ``x(0) = x(1) = 0``, candidate ``x = 0``.
* ``example2``: ``L = y^3``, ``x(0) = 0``, ``x(1) = 1``, candidate with
  ``psi = ((3 alpha - beta) Gamma(alpha) / 2) (1-t)^((alpha-beta)/2)``
  (``x = t^alpha`` when ``alpha = beta``); needs ``beta <= alpha``.
* ``example51``: ``J0`` with ``L0 = y^2``, isoperimetric ``J1`` with
  ``L1 = x`` and value 0, ``x(0) = 0``, ``x(1) = 1``; the candidate is the
  closed-form extremal with ``mu0 = 1/2``; needs ``beta <= alpha``.
"""

from __future__ import annotations

import numpy as np
from scipy.special import gamma, hyp2f1

from .errors import RegimeMismatch
from .fracops import FracTrajectory, Grid, Interval, Orders, PiecewiseSample, make_graded_grid
from .lagrange import parse_lagrangian
from .problem import Constraint, Multipliers, Problem

FIXTURES = ("example1", "example2", "example51")
_ALIASES = {"1": "example1", "2": "example2", "51": "example51"}
DEFAULT_CELLS = 128


def canonical_name(name) -> str:
    key = str(name).strip().lower()
    key = _ALIASES.get(key, key)
    if key not in FIXTURES:
        raise ValueError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
    return key


def power_integral(t, alpha: float, gam: float) -> np.ndarray:
    """``int_0^t (t-tau)^(alpha-1) (1-tau)^gam dtau`` for ``0 <= t <= 1``."""
    t = np.asarray(t, float)
    return t**alpha / alpha * hyp2f1(-gam, 1.0, alpha + 1.0, t)


def example2_coefficient(alpha: float, beta: float) -> float:
    return (3.0 * alpha - beta) * gamma(alpha) / 2.0


def example2_k(alpha: float, beta: float) -> float:
    """Euler-Lagrange constant ``k`` of the Example-2 candidate (``3 Gamma(alpha) c^2``)."""
    return 3.0 * gamma(alpha) * example2_coefficient(alpha, beta) ** 2


def example51_constants(alpha: float, beta: float) -> dict:
    """``P``, ``Q`` (psi = P(1-t)^(alpha-beta) - Q(1-t)^alpha), ``mu1`` and ``k``."""
    a, b = alpha, beta
    return {
        "P": 4 * a * a * (2 * a - b) * gamma(a) / b**2,
        "Q": 2 * a * (4 * a * a - b * b) * gamma(a) / b**2,
        "mu1": 2 * a * (4 * a * a - b * b) * gamma(a) * gamma(a + b) / (b * b * gamma(b)),
        "k": 4 * (2 * a - b) * gamma(a + 1) ** 2 / b**2,
    }


def example51_x(t, alpha: float, beta: float) -> np.ndarray:
    """Closed-form extremal of the isoperimetric example."""
    c = example51_constants(alpha, beta)
    g = gamma(alpha)
    return (c["P"] * power_integral(t, alpha, alpha - beta)
            - c["Q"] * power_integral(t, alpha, alpha)) / g


def example2_x(t, alpha: float, beta: float) -> np.ndarray:
    c = example2_coefficient(alpha, beta)
    return c * power_integral(t, alpha, 0.5 * (alpha - beta)) / gamma(alpha)


def _need_sub(name: str, orders: Orders):
    if orders.beta > orders.alpha:
        raise RegimeMismatch(
            f"{name} closed form requires beta <= alpha (got alpha={orders.alpha}, beta={orders.beta})")


def analytic_fixture(name, alpha: float, beta: float, grid: Grid | None = None):
    """Problem and candidate trajectory for one of the worked examples."""
    key = canonical_name(name)
    orders = Orders(alpha, beta)
    interval = Interval(0.0, 1.0)
    if grid is None:
        grid = make_graded_grid(interval, DEFAULT_CELLS, orders)
    elif grid.interval != interval:
        raise ValueError("fixtures live on [0, 1]")
    a, b = orders.alpha, orders.beta
    t = grid.nodes

    if key == "example1":
        problem = Problem(orders, interval, 1, parse_lagrangian("y^5 + abs(y)", 1), [0.0], [0.0])
        psi = PiecewiseSample.constant(grid, 0.0)
    elif key == "example2":
        _need_sub("example2", orders)
        problem = Problem(orders, interval, 1, parse_lagrangian("y^3", 1), [0.0], [1.0])
        c = example2_coefficient(a, b)
        psi = PiecewiseSample(grid, c * (1.0 - t) ** (0.5 * (a - b)))
    else:
        _need_sub("example51", orders)
        c = example51_constants(a, b)
        problem = Problem(
            orders, interval, 1, parse_lagrangian("y^2", 1), [0.0], [1.0],
            constraints=(Constraint(parse_lagrangian("x", 1), 0.0),),
            multipliers=Multipliers(0.5, (c["mu1"],)),
        )
        psi = PiecewiseSample(grid, c["P"] * (1.0 - t) ** (a - b) - c["Q"] * (1.0 - t) ** a)
    return problem, FracTrajectory(problem.x0, psi, a)
