"""Direct solution of the fractional problem over nodal samples of psi.

The decision vector is ``psi`` at the grid nodes (piecewise linear, no
corners).  The state is the linear image ``x = x0 + A psi`` and the
functional is the same per-cell quadratic rule used by
:func:`fracvar.fracops.weighted_functional`, so a solution's objective and
constraint values agree with the checker to rounding.  The endpoint
condition is linear in ``psi``; it is kept exactly by a null-space Newton
method with an eigenvalue-modified reduced Hessian and Armijo backtracking,
in variables scaled by the diagonal of the quadratic rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space
from scipy.special import gamma

from .errors import BracketError, LagrangianDomainError, NonSmoothError
from .fixtures import analytic_fixture
from .fracops import FracTrajectory, Grid, PiecewiseSample, functional_weights, left_operator
from .fracops.quadrature import left_weights, nodal
from .lagrange import combine, eval_jets, evaluate
from .problem import Problem

__all__ = [
    "Discretization",
    "SolveOptions",
    "SolveResult",
    "analytic_fixture",
    "solve_direct",
    "solve_isoperimetric",
]

BRACKET_LIMIT = 1e6


@dataclass(frozen=True)
class SolveOptions:
    max_iters: int = 500
    grad_tol: float = 1e-9
    endpoint_tol: float = 1e-9
    constraint_solver: str = "newton"
    constraint_tol: float = 1e-9
    max_root_iters: int = 60
    seed: int | None = None
    perturbation: float = 0.0

    def __post_init__(self):
        for name in ("grad_tol", "endpoint_tol", "constraint_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_iters < 1 or self.max_root_iters < 1:
            raise ValueError("iteration limits must be positive")
        if self.constraint_solver not in ("newton", "bisection"):
            raise ValueError("constraint_solver must be 'newton' or 'bisection'")
        if self.perturbation < 0:
            raise ValueError("perturbation must be non-negative")


@dataclass(frozen=True, eq=False)
class SolveResult:
    traj: FracTrajectory
    J: float
    multipliers: tuple[float, tuple[float, ...]] | None
    endpoint_residual: float
    constraint_residuals: np.ndarray
    iterations: int
    converged: bool
    grad_norm: float = float("nan")
    history: tuple[np.ndarray, ...] = field(default=(), repr=False)
    message: str = ""

    def to_dict(self) -> dict:
        mult = None
        if self.multipliers is not None:
            mult = {"mu0": self.multipliers[0], "mu": list(self.multipliers[1])}
        return {
            "J": _num(self.J),
            "multipliers": mult,
            "endpoint_residual": _num(self.endpoint_residual),
            "constraint_residuals": [_num(c) for c in self.constraint_residuals],
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
            "grad_norm": _num(self.grad_norm),
            "message": self.message,
        }


def _num(v):
    v = float(v)
    return v if math.isfinite(v) else None


class Discretization:
    """Linear maps and weights of the discrete functional on a grid.

    Sample points are the ``N+1`` nodes followed by the ``N`` cell midpoints.
    """

    def __init__(self, problem: Problem, grid: Grid):
        if grid.interval != problem.interval:
            raise ValueError("grid interval differs from the problem interval")
        self.problem = problem
        self.grid = grid
        alpha, beta = problem.orders.alpha, problem.orders.beta
        nodes = grid.nodes
        N = nodes.size - 1
        mids = 0.5 * (nodes[:-1] + nodes[1:])
        a_nodes = left_operator(nodes, alpha)
        a_nodes[0] = 0.0
        a_mid = nodal(*left_weights(nodes, mids, alpha))
        self.A = np.vstack([a_nodes, a_mid])
        avg = np.zeros((N, N + 1))
        avg[np.arange(N), np.arange(N)] = 0.5
        avg[np.arange(N), np.arange(N) + 1] = 0.5
        self.B = np.vstack([np.eye(N + 1), avg])
        wa, wm, wb = functional_weights(nodes, beta)
        w_nodes = np.zeros(N + 1)
        w_nodes[:-1] += wa
        w_nodes[1:] += wb
        self.W = np.concatenate([w_nodes, wm])
        self.t = np.concatenate([nodes, mids])
        self.a_end = a_nodes[-1].copy()
        d = np.abs(self.W) @ (self.B**2)
        n = problem.n
        # variables are psi flattened row-major; scale[j*n + k] = d_j^(-1/2)
        self.scale = np.repeat(1.0 / np.sqrt(np.maximum(d, 1e-300)), n)
        self.C = np.kron(self.a_end[None, :], np.eye(n))
        cs = self.C * self.scale[None, :]
        self.null = null_space(cs)
        self.cs_pinv = np.linalg.pinv(cs)
        # G[p] maps the flattened psi to (x_p, y_p)
        eye = np.eye(n)
        self.G = np.concatenate([np.einsum("pj,km->pkjm", self.A, eye),
                                 np.einsum("pj,km->pkjm", self.B, eye)], axis=1).reshape(len(self.t), 2 * n, -1)

    def state(self, psi: np.ndarray):
        return self.problem.x0 + self.A @ psi, self.B @ psi

    def functional(self, expr, psi: np.ndarray) -> float:
        x, y = self.state(psi)
        return float(self.W @ evaluate(expr, self.t, x, y))

    def value_grad(self, expr, psi: np.ndarray):
        x, y = self.state(psi)
        jets = eval_jets(expr, self.t, x, y, order=1)
        if jets.nonsmooth_x.any() or jets.nonsmooth_y.any():
            p = int(np.nonzero(jets.nonsmooth_x.any(axis=1) | jets.nonsmooth_y.any(axis=1))[0][0])
            raise NonSmoothError(f"Lagrangian not differentiable along the iterate at t = {self.t[p]:.17g}")
        W = self.W[:, None]
        grad = self.A.T @ (W * jets.grad_x) + self.B.T @ (W * jets.grad_y)
        return float(self.W @ jets.value), grad

    def value_grad_hess(self, expr, psi: np.ndarray):
        """Functional, gradient (shape of ``psi``) and flattened Hessian."""
        x, y = self.state(psi)
        jets = eval_jets(expr, self.t, x, y, order=2, full=True)
        bad = jets.nonsmooth_x.any(axis=1) | jets.nonsmooth_y.any(axis=1) | jets.nonsmooth_hess.any(axis=(1, 2))
        if bad.any():
            p = int(np.nonzero(bad)[0][0])
            raise NonSmoothError(f"Lagrangian not twice differentiable along the iterate at t = {self.t[p]:.17g}")
        W = self.W[:, None]
        grad = self.A.T @ (W * jets.grad_x) + self.B.T @ (W * jets.grad_y)
        weighted = self.W[:, None, None] * jets.hess_yy
        hess = np.einsum("pau,pab,pbv->uv", self.G, weighted, self.G, optimize=True)
        return float(self.W @ jets.value), grad, hess

    def endpoint(self, psi: np.ndarray) -> np.ndarray:
        return self.problem.x0 + self.a_end @ psi - self.problem.x1

    def trajectory(self, psi: np.ndarray) -> FracTrajectory:
        return FracTrajectory(self.problem.x0, PiecewiseSample(self.grid, psi), self.problem.orders.alpha)


class _State:
    """Warm-startable iterate shared by successive solves."""

    def __init__(self, psi):
        self.psi = psi


def _initial_psi(problem: Problem, grid: Grid, opts: SolveOptions) -> np.ndarray:
    alpha = problem.orders.alpha
    c = (problem.x1 - problem.x0) * gamma(alpha + 1.0) / problem.interval.length**alpha
    psi = np.tile(c, (grid.nodes.size, 1))
    if opts.perturbation > 0:
        rng = np.random.default_rng(opts.seed)
        psi = psi + opts.perturbation * max(1.0, float(np.max(np.abs(c)))) * rng.standard_normal(psi.shape)
    return psi


def _minimize(disc: Discretization, expr, st: _State, opts: SolveOptions, budget: int):
    """Null-space Newton iteration; updates ``st.psi`` in place.

    Returns ``(iterations, converged, grad_norm, history, message)`` where
    ``grad_norm`` is the sup norm of the scaled reduced gradient relative to
    ``max(1, |J|)`` and ``history`` holds the accepted objective values.
    """
    shape = st.psi.shape
    S, Z = disc.scale, disc.null
    v = st.psi.reshape(-1).copy()
    # restore feasibility once (the iterates keep it up to rounding)
    v += S * (disc.cs_pinv @ -disc.endpoint(v.reshape(shape)))
    f, g, H = disc.value_grad_hess(expr, v.reshape(shape))
    trace = [f]
    gnorm = np.inf
    iters = 0
    message = "iteration budget exhausted"
    while iters < budget:
        gs = S * g.reshape(-1)
        gr = Z.T @ gs
        gnorm = float(np.max(np.abs(gr))) / max(1.0, abs(f)) if gr.size else 0.0
        if gnorm <= opts.grad_tol:
            st.psi = v.reshape(shape)
            return iters, True, gnorm, (np.array(trace),), "converged"
        Hr = Z.T @ ((S[:, None] * H * S[None, :]) @ Z)
        lam, V = np.linalg.eigh(Hr)
        top = float(np.max(np.abs(lam)))
        lam = np.maximum(np.abs(lam), 1e-12 * top if top > 0 else 1.0)
        dz = -Z @ (V @ ((V.T @ gr) / lam))
        d = S * dz
        slope = float(gs @ dz)
        step = 1.0
        accepted = False
        for _ in range(60):
            trial = v + step * d
            try:
                f_new, g_new, H_new = disc.value_grad_hess(expr, trial.reshape(shape))
            except (LagrangianDomainError, NonSmoothError):
                step *= 0.5
                continue
            if np.isfinite(f_new) and f_new <= f + 1e-4 * step * slope:
                accepted = True
                break
            step *= 0.5
        iters += 1
        if not accepted:
            # no decrease representable in floating point: accept a tiny
            # reduced gradient as converged, otherwise report the stall
            ok = gnorm <= 1e3 * opts.grad_tol
            message = "converged" if ok else "line search failed"
            st.psi = v.reshape(shape)
            return iters, ok, gnorm, (np.array(trace),), message
        v, f, g, H = trial, f_new, g_new, H_new
        trace.append(f)
    st.psi = v.reshape(shape)
    return iters, False, gnorm, (np.array(trace),), message


def solve_direct(problem: Problem, grid: Grid, opts: SolveOptions = SolveOptions(),
                 _state: _State | None = None, _lagrangian=None) -> SolveResult:
    """Minimize the discrete functional subject to the endpoint condition."""
    if problem.constraints and _lagrangian is None:
        raise ValueError("problem has isoperimetric constraints; use solve_isoperimetric")
    expr = problem.lagrangian if _lagrangian is None else _lagrangian
    disc = Discretization(problem, grid)
    st = _state or _State(_initial_psi(problem, grid, opts))
    iters, ok, gnorm, hist, msg = _minimize(disc, expr, st, opts, opts.max_iters)
    traj = disc.trajectory(st.psi)
    resid = float(np.max(np.abs(disc.endpoint(st.psi))))
    return SolveResult(traj, disc.functional(problem.lagrangian, st.psi), None, resid, np.zeros(0),
                       iters, ok, gnorm, tuple(hist), msg)


def solve_isoperimetric(problem: Problem, grid: Grid, opts: SolveOptions = SolveOptions()) -> SolveResult:
    """Solve with one isoperimetric constraint, ``mu0 = 1/2`` and root-found ``mu1``.

    ``F(mu1) = J1(x(mu1)) - l1`` where ``x(mu1)`` minimizes the functional of
    ``L0/2 + mu1 L1``.  A sign change is bracketed by scanning
    ``mu1 = 0, +-1, +-10, ..., +-1e6``, narrowed by bisection and, for the
    Newton option, finished with safeguarded secant steps.
    """
    if len(problem.constraints) != 1:
        raise ValueError("exactly one isoperimetric constraint is supported")
    con = problem.constraints[0]
    mu0 = 0.5
    disc = Discretization(problem, grid)
    st = _State(_initial_psi(problem, grid, opts))
    total = [0]
    cache = {}

    def residual(mu1: float):
        key = float(mu1)
        if key in cache:
            return cache[key][0]
        expr = combine([(mu0, problem.lagrangian), (key, con.lagrangian)], problem.n)
        budget = opts.max_iters - total[0]
        if budget <= 0:
            raise _Budget()
        it, ok, gnorm, hist, msg = _minimize(disc, expr, st, opts, budget)
        total[0] += it
        f = disc.functional(con.lagrangian, st.psi) - con.value
        cache[key] = (f, st.psi.copy(), ok, gnorm, hist, msg)
        return f

    def finish(mu1: float, ok_root: bool, msg_root: str) -> SolveResult:
        f, psi, ok, gnorm, hist, msg = cache[float(mu1)]
        traj = disc.trajectory(psi)
        resid = float(np.max(np.abs(disc.endpoint(psi))))
        J0 = disc.functional(problem.lagrangian, psi)
        good = ok and ok_root
        return SolveResult(traj, J0, (mu0, (float(mu1),)), resid, np.array([f]), total[0], good, gnorm,
                           tuple(hist), msg_root if ok else msg)

    try:
        lo, hi, flo, fhi = _bracket(residual, opts)
    except _Budget:
        last = list(cache)[-1]
        return finish(last, False, "iteration budget exhausted while bracketing")
    if lo == hi:
        return finish(lo, True, "converged")
    try:
        mu, ok = _root(residual, lo, hi, flo, fhi, opts)
    except _Budget:
        last = list(cache)[-1]
        return finish(last, False, "iteration budget exhausted during root finding")
    return finish(mu, ok, "converged" if ok else "multiplier root finding did not converge")


class _Budget(Exception):
    pass


def _bracket(F, opts: SolveOptions):
    f0 = F(0.0)
    if abs(f0) <= opts.constraint_tol:
        return 0.0, 0.0, f0, f0
    pts = [(0.0, f0)]
    m = 1.0
    while m <= BRACKET_LIMIT:
        for mu in (m, -m):
            f = F(mu)
            if abs(f) <= opts.constraint_tol:
                return mu, mu, f, f
            pts.append((mu, f))
        pts.sort()
        for (m1, f1), (m2, f2) in zip(pts, pts[1:]):
            if f1 * f2 < 0:
                return m1, m2, f1, f2
        m *= 10.0
    vals = [p[1] for p in pts]
    raise BracketError(
        f"no sign change of J1 - l1 for mu1 in [-{BRACKET_LIMIT:g}, {BRACKET_LIMIT:g}] "
        f"(J1 - l1 ranged over [{min(vals):.6g}, {max(vals):.6g}])",
        (-BRACKET_LIMIT, BRACKET_LIMIT), (pts[0][1], pts[-1][1]))


def _root(F, lo, hi, flo, fhi, opts: SolveOptions):
    bisect_first = 2 if opts.constraint_solver == "newton" else opts.max_root_iters
    x_prev, f_prev = lo, flo
    x_cur, f_cur = hi, fhi
    for i in range(opts.max_root_iters):
        if i < bisect_first:
            x_new = 0.5 * (lo + hi)
        else:
            denom = f_cur - f_prev
            x_new = x_cur - f_cur * (x_cur - x_prev) / denom if denom != 0 else 0.5 * (lo + hi)
            if not lo < x_new < hi:
                x_new = 0.5 * (lo + hi)
        f_new = F(x_new)
        if abs(f_new) <= opts.constraint_tol:
            return x_new, True
        if (f_new < 0) == (flo < 0):
            lo, flo = x_new, f_new
        else:
            hi, fhi = x_new, f_new
        x_prev, f_prev, x_cur, f_cur = x_cur, f_cur, x_new, f_new
        if hi - lo <= 1e-15 * max(1.0, abs(lo), abs(hi)):
            return x_new, False
    return x_cur, False
