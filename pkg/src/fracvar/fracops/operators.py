"""Fractional integrals, the Caputo derivative and the weighted functional."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import beta as beta_fn
from scipy.special import gamma

from ..errors import DivergedEvaluation, LagrangianDomainError
from .quadrature import endpoint_weights, kernel_weights, left_weights, nodal
from .types import FracTrajectory, PiecewiseSample


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not (math.isfinite(alpha) and 0.0 < alpha <= 1.0):
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    return alpha


def _check_points(grid, eval_points) -> np.ndarray:
    t = np.atleast_1d(np.asarray(eval_points, float))
    lo, hi = grid.interval.t0, grid.interval.t1
    slack = 1e-14 * grid.interval.length
    if np.any(~np.isfinite(t)) or np.any(t < lo - slack) or np.any(t > hi + slack):
        raise ValueError(f"evaluation points must lie in [{lo}, {hi}]")
    return np.clip(t, lo, hi)


def _apply(weights, sample: PiecewiseSample) -> np.ndarray:
    wa, wb = weights
    fa, fb = sample.cell_values
    return wa @ fa + wb @ fb


def rl_integral_left(psi: PiecewiseSample, alpha: float, eval_points) -> np.ndarray:
    """Left Riemann-Liouville integral ``(I^alpha_{t0+} psi)(t)``, shape ``(m, n)``."""
    alpha = _check_alpha(alpha)
    t = _check_points(psi.grid, eval_points)
    return _apply(left_weights(psi.grid.nodes, t, alpha), psi)


def rl_integral_right_weighted(g: PiecewiseSample, alpha: float, beta: float, eval_points) -> np.ndarray:
    """``(I^alpha_{t1-} b)(t)`` with ``b(tau) = (t1 - tau)**(beta-1) g(tau)``.

    At ``t = t1`` the integral is zero for ``alpha + beta > 1``, equals
    ``B(alpha, beta) g(t1-) / Gamma(alpha)`` when ``alpha + beta = 1`` and
    diverges otherwise.
    """
    alpha = _check_alpha(alpha)
    beta = float(beta)
    if not (math.isfinite(beta) and beta > 0.0):
        raise ValueError(f"beta must be positive, got {beta}")
    t = _check_points(g.grid, eval_points)
    t1 = g.grid.interval.t1
    nodes = g.grid.nodes
    out = np.zeros((t.size, g.dim))
    g_end = g.cell_values[1][-1]
    ga = gamma(alpha)
    for i, ti in enumerate(t):
        if ti >= t1:
            s = alpha + beta
            if abs(s - 1.0) <= 1e-14:
                out[i] = beta_fn(alpha, beta) * g_end / ga
            elif s < 1.0:
                raise DivergedEvaluation(
                    f"right integral diverges at t1 for alpha + beta = {s:.6g} < 1")
            continue
        wts = kernel_weights(nodes, ti, t1, [ti, t1], [alpha - 1.0, beta - 1.0])
        out[i] = _apply(wts, g) / ga
    if not np.all(np.isfinite(out)):
        bad = t[np.nonzero(~np.all(np.isfinite(out), axis=1))[0][0]]
        raise DivergedEvaluation(f"non-finite right integral at t = {bad:.17g}")
    return out


def left_operator(nodes: np.ndarray, alpha: float) -> np.ndarray:
    """Nodal matrix ``A`` with ``(I^alpha l)(t_i) = (A @ l)_i`` for corner-free data."""
    return nodal(*left_weights(nodes, nodes, alpha))


def caputo_left(x_samples: PiecewiseSample, alpha: float) -> PiecewiseSample:
    """Caputo derivative of nodal samples by inverting the discrete integral.

    Finds the piecewise-linear ``psi`` whose product-rule integral reproduces
    ``x - x(t0)`` at every node ``t_1 .. t_N``.  The one missing equation is
    a closure at ``t0``: ``psi_0`` is the linear extrapolation of ``psi_1``
    and ``psi_2``.  The result is second-order accurate in the local cell
    width for smooth ``psi``, including at the first nodes.
    """
    alpha = _check_alpha(alpha)
    if x_samples.corners:
        raise ValueError("caputo_left needs continuous samples (no corners)")
    nodes = x_samples.grid.nodes
    mat = left_operator(nodes, alpha)
    h0, h1 = nodes[1] - nodes[0], nodes[2] - nodes[1]
    mat[0, :] = 0.0
    mat[0, 0] = 1.0
    mat[0, 1] = -(1.0 + h0 / h1)
    mat[0, 2] = h0 / h1
    rhs = x_samples.values - x_samples.values[0]
    rhs[0] = 0.0
    return PiecewiseSample(x_samples.grid, np.linalg.solve(mat, rhs))


def reconstruct(traj: FracTrajectory, eval_points) -> np.ndarray:
    """State ``x(t) = x0 + I^alpha psi`` at arbitrary points of the interval."""
    return traj.x0 + rl_integral_left(traj.psi, traj.alpha, eval_points)


def weighted_integral(g: PiecewiseSample, beta: float) -> np.ndarray:
    """``int (t1 - t)**(beta-1) g(t) dt`` with ``g`` piecewise linear."""
    return _apply(endpoint_weights(g.grid.nodes, float(beta)), g)


def trajectory_points(traj: FracTrajectory):
    """Arguments ``(t, x, y)`` at all nodes, then at each corner's left limit.

    Returns ``(t, x, y)`` with ``N + 1 + len(corners)`` rows.
    """
    psi = traj.psi
    nodes = traj.grid.nodes
    xs = traj.x_nodes
    c = list(psi.corners)
    t = np.concatenate([nodes, nodes[c]])
    x = np.vstack([xs, xs[c]])
    y = np.vstack([psi.values, psi.left_values])
    return t, x, y


def sample_from_points(traj: FracTrajectory, vals: np.ndarray) -> PiecewiseSample:
    """Inverse of :func:`trajectory_points` for computed per-point values."""
    vals = np.asarray(vals, float)
    if vals.ndim == 1:
        vals = vals[:, None]
    n_nodes = traj.grid.nodes.size
    corners = traj.psi.corners
    return PiecewiseSample(traj.grid, vals[:n_nodes], corners,
                           vals[n_nodes:] if corners else None)


def lagrangian_sample(expr, traj: FracTrajectory) -> PiecewiseSample:
    """``L(t, x(t), psi(t))`` along the trajectory, respecting corners."""
    from ..lagrange import evaluate

    t, x, y = trajectory_points(traj)
    try:
        vals = evaluate(expr, t, x, y)
    except LagrangianDomainError as exc:
        p = exc.point_index
        where = f" at t = {t[p]:.17g}" if p is not None else ""
        raise LagrangianDomainError(f"{exc}{where}", exc.offset, p) from exc
    return sample_from_points(traj, vals)


def functional_weights(nodes: np.ndarray, beta: float):
    """Weights ``(wa, wm, wb)`` of the per-cell quadratic rule for the functional.

    The integrand is interpolated through each cell's endpoints and midpoint
    and integrated exactly against ``(t1 - t)**(beta-1)``.
    """
    nodes = np.asarray(nodes, float)
    return kernel_weights(nodes, nodes[0], nodes[-1], [nodes[-1]], [float(beta) - 1.0], quadratic=True)


def midpoint_arguments(traj: FracTrajectory):
    """``(t, x, y)`` at cell midpoints; ``y`` averages the cell's end values."""
    nodes = traj.grid.nodes
    mid = 0.5 * (nodes[:-1] + nodes[1:])
    fa, fb = traj.psi.cell_values
    return mid, reconstruct(traj, mid), 0.5 * (fa + fb)


def weighted_functional(problem, traj: FracTrajectory, lagrangian=None) -> float:
    """``J = int (t1 - t)**(beta-1) L(t, x, psi) dt`` for the problem's Lagrangian.

    ``L`` is sampled at the nodes (both one-sided values at corners) and at
    cell midpoints, interpolated quadratically per cell and integrated against
    the exact weight.  ``lagrangian`` overrides the problem's effective
    Lagrangian (used for isoperimetric constraint functionals).
    """
    from ..lagrange import evaluate

    expr = problem.effective_lagrangian() if lagrangian is None else lagrangian
    g = lagrangian_sample(expr, traj)
    tm, xm, ym = midpoint_arguments(traj)
    try:
        gm = evaluate(expr, tm, xm, ym)
    except LagrangianDomainError as exc:
        p = exc.point_index
        raise LagrangianDomainError(f"{exc} at cell midpoint t = {tm[p]:.17g}", exc.offset, p) from exc
    wa, wm, wb = functional_weights(traj.grid.nodes, problem.orders.beta)
    fa, fb = g.cell_values
    return float(wa @ fa[:, 0] + wm @ gm + wb @ fb[:, 0])
