"""Constructive variations: Du Bois-Reymond builders and the special variation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gamma

from .errors import EndpointResidualError, InadmissibleEpsilon
from .fracops import (
    FracTrajectory,
    Grid,
    Interval,
    Orders,
    PiecewiseSample,
    Regime,
    make_graded_grid,
    rl_integral_left,
    weighted_functional,
)
from .fracops.quadrature import endpoint_weights, kernel_weights
from .problem import Problem

DEFAULT_CELLS = 64
ENDPOINT_TOL = 1e-6
AGREEMENT_TOL = 1e-8


def _apply(weights, sample: PiecewiseSample) -> np.ndarray:
    wa, wb = weights
    fa, fb = sample.cell_values
    return wa @ fa + wb @ fb


# --------------------------------------------------------------------------
# Du Bois-Reymond


@dataclass(frozen=True, eq=False)
class DuBoisReymondVariation:
    """Admissible ``h`` built from ``f`` so that the pairing isolates ``f``.

    ``h_values`` holds ``h`` at the nodes computed with the power factor of
    ``psi_h`` inside the quadrature kernel, which keeps ``h(t1)`` at rounding
    level; ``h.x_nodes`` is the plain reconstruction from sampled ``psi_h``.
    """

    regime: Regime
    f: PiecewiseSample
    k0_or_k: float
    h: FracTrajectory
    h_values: np.ndarray
    endpoint_residual: float
    orders: Orders


def _power_weight_integrals(nodes, f: PiecewiseSample, alpha, expo, t1):
    """``int_{t0}^{t} (t-tau)^(alpha-1) (t1-tau)^expo l(tau) dtau`` at every node.

    Also returns the same integral for ``l = 1``.
    """
    out_f = np.zeros((nodes.size, f.dim))
    out_1 = np.zeros(nodes.size)
    for j in range(1, nodes.size):
        t = nodes[j]
        wa, wb = kernel_weights(nodes, nodes[0], t, [t, t1], [alpha - 1.0, expo])
        out_f[j] = _apply((wa, wb), f)
        out_1[j] = wa.sum() + wb.sum()
    return out_f, out_1


def build_dbr_variation(f: PiecewiseSample, orders: Orders, tol: float = ENDPOINT_TOL) -> DuBoisReymondVariation:
    """Variation from the necessity half of the fractional Du Bois-Reymond lemma.

    Super (beta > alpha)::

        psi_h = Gamma(alpha) (t1-t)^(beta-alpha) f - k0,
        k0 = Gamma(alpha+1) / (t1-t0)^alpha * int (t1-t)^(beta-1) f

    Sub (beta <= alpha)::

        psi_h = f - k/Gamma(alpha) (t1-t)^(alpha-beta),
        k = (2 alpha - beta) Gamma(alpha) / (t1-t0)^(2 alpha-beta) * int (t1-t)^(alpha-1) f
    """
    if f.dim != 1:
        raise ValueError("f must be scalar")
    alpha, beta = orders.alpha, orders.beta
    grid = f.grid
    nodes = grid.nodes
    t0, t1 = grid.interval.t0, grid.interval.t1
    length = grid.interval.length
    regime = orders.regime()
    ga = gamma(alpha)

    if regime is Regime.SUPER:
        moment = float(_apply(endpoint_weights(nodes, beta), f)[0])
        const = gamma(alpha + 1.0) / length**alpha * moment
        expo = beta - alpha

        def psi_of(vals, t):
            return ga * (t1 - t) ** expo * vals - const
    else:
        moment = float(_apply(endpoint_weights(nodes, alpha), f)[0])
        const = (2.0 * alpha - beta) * ga / length ** (2.0 * alpha - beta) * moment
        expo = alpha - beta

        def psi_of(vals, t):
            return vals - const / ga * (t1 - t) ** expo

    fa_t = nodes[list(f.corners)]
    psi_vals = psi_of(f.values[:, 0], nodes)
    left = psi_of(f.left_values[:, 0], fa_t) if f.corners else None
    psi = PiecewiseSample(grid, psi_vals, f.corners, None if left is None else left[:, None])
    h = FracTrajectory(np.zeros(1), psi, alpha)

    if regime is Regime.SUPER:
        If, _ = _power_weight_integrals(nodes, f, alpha, expo, t1)
        hv = If[:, 0] - const * (nodes - t0) ** alpha / gamma(alpha + 1.0)
    else:
        If = rl_integral_left(f, alpha, nodes)[:, 0]
        _, I1 = _power_weight_integrals(nodes, PiecewiseSample.constant(grid, 0.0), alpha, expo, t1)
        hv = If - const / ga**2 * I1
    hv[0] = 0.0
    resid = abs(float(hv[-1]))
    if not np.isfinite(resid):
        raise EndpointResidualError("h(t1) is not finite")
    scale = max(1.0, float(np.max(np.abs(hv))))
    if resid > tol * scale:
        raise EndpointResidualError(
            f"|h(t1)| = {resid:.3e} exceeds {tol:.1e}; refine the grid (currently {grid.n_cells} cells)")
    return DuBoisReymondVariation(regime, f, float(const), h, hv, resid, orders)


# --------------------------------------------------------------------------
# Special variation


def psi_bracket(t, tau, eps, l1, l2, alpha):
    """``(t - tau - l1 eps)_+^alpha - (t - tau - l2 eps)_+^alpha``."""
    t = np.asarray(t, float)
    p = np.maximum(t - tau - l1 * eps, 0.0) ** alpha
    q = np.maximum(t - tau - l2 * eps, 0.0) ** alpha
    return p - q


def k_of_eps(tau: float, a: float, b: float, eps: float, alpha: float, t1: float) -> float:
    """``k(eps) = phi(t1, eps) / psi[0, a+b](t1, eps)``."""
    phi = psi_bracket(t1, tau, eps, 0.0, a, alpha) - (a / b) * psi_bracket(t1, tau, eps, a, a + b, alpha)
    return float(phi / psi_bracket(t1, tau, eps, 0.0, a + b, alpha))


def special_h_closed_form(t, tau, a, b, xi, eps, alpha, k):
    """Four-branch closed form of the special variation, shape ``(m, n)``."""
    t = np.asarray(t, float)
    xi = np.atleast_1d(np.asarray(xi, float))
    c = 1.0 / gamma(alpha + 1.0)
    s1, s2 = tau + a * eps, tau + (a + b) * eps
    u = np.maximum(t - tau, 0.0) ** alpha
    v = np.maximum(t - s1, 0.0) ** alpha
    w = np.maximum(t - s2, 0.0) ** alpha
    # (1-k) u - (1 + a/b) v + (a/b + k) w vanishes identically before tau
    scal = c * ((1.0 - k) * u - (1.0 + a / b) * v + (a / b + k) * w)
    return scal[:, None] * xi[None, :]


def bound_M(a: float, b: float, xi, alpha: float) -> float:
    """Constant ``M`` with ``sup |h(., eps)| <= M eps^alpha``."""
    nrm = float(np.linalg.norm(np.atleast_1d(xi)))
    return nrm / gamma(alpha + 1.0) * (2.0 * a**alpha + (a / b + 1.0) * b**alpha)


def admissible_eps(tau, a, b, alpha, t1, eps_max, iters: int = 60) -> float:
    """Largest eps in ``(0, eps_max]`` (to bisection accuracy) with ``|k| < min(1, a/b)``."""
    bound = min(1.0, a / b)

    def ok(e):
        return abs(k_of_eps(tau, a, b, e, alpha, t1)) < bound

    if ok(eps_max):
        return float(eps_max)
    lo, hi = 0.0, float(eps_max)
    probe = eps_max
    for _ in range(200):
        probe *= 0.5
        if ok(probe):
            lo = probe
            break
        hi = probe
    else:
        return 0.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


@dataclass(frozen=True, eq=False)
class SpecialVariation:
    tau: float
    a: float
    b: float
    xi: np.ndarray
    eps: float
    k_eps: float
    h: FracTrajectory
    bound_M: float
    h_closed: np.ndarray
    agreement: float
    support: tuple[int, int, int]

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.linalg.norm(self.h_closed, axis=1)))


def build_special_variation(tau: float, a: float, b: float, xi, eps: float, orders: Orders,
                            interval: Interval, grid: Grid | None = None) -> SpecialVariation:
    """Special variation with piecewise-constant Caputo derivative.

    ``psi_h = xi (1 - k)`` on ``[tau, tau + a eps)``, ``-xi (a/b + k)`` on
    ``[tau + a eps, tau + (a+b) eps)`` and zero elsewhere.  The three
    breakpoints are inserted into ``grid`` (a default graded grid when
    omitted) so the jumps sit exactly on nodes.
    """
    tau, a, b, eps = float(tau), float(a), float(b), float(eps)
    xi = np.atleast_1d(np.asarray(xi, float))
    if not (a > 0 and b > 0 and eps > 0):
        raise ValueError("a, b and eps must be positive")
    t0, t1 = interval.t0, interval.t1
    if tau < t0 or not tau + (a + b) * eps < t1:
        raise ValueError("need t0 <= tau and tau + (a+b) eps < t1")
    alpha = orders.alpha
    k = k_of_eps(tau, a, b, eps, alpha, t1)
    if not abs(k) < min(1.0, a / b):
        thr = admissible_eps(tau, a, b, alpha, t1, eps)
        raise InadmissibleEpsilon(
            f"|k(eps)| = {abs(k):.6g} >= min(1, a/b) = {min(1.0, a / b):.6g}; "
            f"admissible eps up to about {thr:.6g}", thr)

    base = make_graded_grid(interval, DEFAULT_CELLS, orders) if grid is None else grid
    if base.interval != interval:
        raise ValueError("grid interval differs from the requested interval")
    s1, s2 = tau + a * eps, tau + (a + b) * eps
    g, idx = base.insert([tau, s1, s2])
    i0, i1, i2 = (int(i) for i in idx)
    n = xi.size
    vals = np.zeros((g.nodes.size, n))
    vals[i0:i1] = xi * (1.0 - k)
    vals[i1:i2] = -xi * (a / b + k)
    corners, left = [], []
    if i0 > 0:
        corners.append(i0)
        left.append(np.zeros(n))
    corners += [i1, i2]
    left += [xi * (1.0 - k), -xi * (a / b + k)]
    psi = PiecewiseSample(g, vals, tuple(corners), np.array(left))
    h = FracTrajectory(np.zeros(n), psi, alpha)
    closed = special_h_closed_form(g.nodes, tau, a, b, xi, eps, alpha, k)
    agreement = float(np.max(np.abs(h.x_nodes - closed)))
    if agreement > AGREEMENT_TOL * max(1.0, float(np.max(np.abs(closed)))):
        raise RuntimeError(f"special variation representations disagree by {agreement:.3e}")
    return SpecialVariation(tau, a, b, xi, eps, k, h, bound_M(a, b, xi, alpha), closed, agreement,
                            (i0, i1, i2))


# --------------------------------------------------------------------------
# pairing self-test and descent probe


def sub_pairing_integral(var, k_f: float, orders: Orders) -> float:
    """``int (t1-t)^(beta-1) f psi_h dt`` for ``f = (k_f/Gamma(alpha)) (t1-t)^(alpha-beta)``.

    The product of the weight and ``f`` is folded into the quadrature kernel
    ``(t1-t)^(alpha-1)`` exactly; the remaining factor of ``psi_h`` is
    interpolated (or, for a Du Bois-Reymond variation, split into its
    smooth part and its explicit power).  The lemma predicts the value
    ``k_f (h(t1) - h(t0)) = 0``.
    """
    alpha, beta = orders.alpha, orders.beta
    ga = gamma(alpha)
    if isinstance(var, SpecialVariation):
        psi = var.h.psi
        nodes = psi.grid.nodes
        t1 = nodes[-1]
        wts = kernel_weights(nodes, nodes[0], t1, [t1], [alpha - 1.0])
        return float(k_f / ga * _apply(wts, psi) @ np.ones(psi.dim))
    nodes = var.f.grid.nodes
    t1 = nodes[-1]
    if var.regime is Regime.SUPER:
        # psi_h = Gamma(alpha) (t1-t)^(beta-alpha) f - k0
        w_f = kernel_weights(nodes, nodes[0], t1, [t1], [beta - 1.0])
        w_1 = kernel_weights(nodes, nodes[0], t1, [t1], [alpha - 1.0])
        val = ga * _apply(w_f, var.f)[0] - var.k0_or_k * (w_1[0].sum() + w_1[1].sum())
    else:
        # psi_h = f - (k/Gamma(alpha)) (t1-t)^(alpha-beta)
        w_f = kernel_weights(nodes, nodes[0], t1, [t1], [alpha - 1.0])
        w_p = kernel_weights(nodes, nodes[0], t1, [t1], [2.0 * alpha - beta - 1.0])
        val = _apply(w_f, var.f)[0] - var.k0_or_k / ga * (w_p[0].sum() + w_p[1].sum())
    return float(k_f / ga * val)


def descent_probe(problem: Problem, traj: FracTrajectory, witness, eps_grid) -> list[tuple[float, float]]:
    """Increment ``J(x0 + h(., eps)) - J(x0)`` along special variations.

    ``witness`` is ``(tau, a, b, xi)``.  Raises :class:`InadmissibleEpsilon`
    for any eps violating the ``|k(eps)|`` bound.
    """
    tau, a, b, xi = witness
    xi = np.atleast_1d(np.asarray(xi, float))
    if xi.shape != (problem.n,):
        raise ValueError("xi must have dimension n")
    nodes = traj.grid.nodes
    out = []
    for eps in eps_grid:
        eps = float(eps)
        hi = tau + (a + b) * eps
        inside = [c for c in traj.psi.corners if tau <= nodes[c] < hi]
        if inside:
            raise ValueError("the variation's support contains a corner of the trajectory")
        var = build_special_variation(tau, a, b, xi, eps, problem.orders, problem.interval, traj.grid)
        psi0 = traj.psi.resample(var.h.grid)
        base = FracTrajectory(traj.x0, psi0, traj.alpha)
        moved = FracTrajectory(traj.x0, psi0 + var.h.psi, traj.alpha)
        dj = weighted_functional(problem, moved) - weighted_functional(problem, base)
        out.append((eps, float(dj)))
    return out
