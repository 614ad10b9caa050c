"""Necessary conditions evaluated along a candidate trajectory.

Every check returns a :class:`ConditionReport`.  Residual-type checks
(Euler-Lagrange, corners) report a sup-norm; sign-type checks (Weierstrass,
(a, b, xi)-inequality, Legendre) report the size of the worst negative value
in ``residual_sup`` and the signed per-node minimum in ``node_values``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma

from ._parallel import ordered_map
from .errors import NonSmoothError
from .fracops import (
    FracTrajectory,
    Regime,
    reconstruct,
    rl_integral_right_weighted,
    trajectory_points,
    weighted_functional,
)
from .fracops.operators import sample_from_points
from .lagrange import eval_jets, evaluate
from .problem import Constraint, Multipliers, Problem

__all__ = [
    "ConditionReport",
    "Constraint",
    "Multipliers",
    "Problem",
    "ScanMode",
    "ScanSpec",
    "Verdict",
    "Witness",
    "abxi_inequality",
    "abxi_profile",
    "abxi_scan",
    "corner_conditions",
    "el_residual",
    "isoperimetric_el_residual",
    "legendre_check",
    "weierstrass_gap",
    "weierstrass_scan",
]

DEFAULT_TOL = 1e-6
MAX_WITNESSES = 10


class Verdict(enum.Enum):
    SATISFIED = "satisfied"
    VIOLATED = "violated"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Witness:
    """Where a condition was probed and the value found there."""

    value: float
    t: float | None = None
    a: float | None = None
    b: float | None = None
    xi: tuple[float, ...] | None = None
    mu: tuple[float, ...] | None = None
    kind: str = ""

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "value": _num(self.value)}
        for key in ("t", "a", "b"):
            v = getattr(self, key)
            if v is not None:
                out[key] = _num(v)
        for key in ("xi", "mu"):
            v = getattr(self, key)
            if v is not None:
                out[key] = [_num(c) for c in v]
        return out


@dataclass(frozen=True, eq=False)
class ConditionReport:
    condition: str
    regime: Regime
    verdict: Verdict
    residual_sup: float
    fitted_k: tuple[float, ...] | None = None
    witnesses: tuple[Witness, ...] = ()
    notes: tuple[str, ...] = ()
    node_t: np.ndarray = field(default_factory=lambda: np.zeros(0))
    node_values: np.ndarray = field(default_factory=lambda: np.zeros(0))
    extras: dict = field(default_factory=dict)

    @property
    def satisfied(self) -> bool:
        return self.verdict is Verdict.SATISFIED

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "regime": self.regime.value,
            "verdict": self.verdict.value,
            "residual_sup": _num(self.residual_sup),
            "fitted_k": None if self.fitted_k is None else [_num(k) for k in self.fitted_k],
            "witnesses": [w.to_dict() for w in self.witnesses],
            "notes": list(self.notes),
            "per_node": [[_num(t), _num(v)] for t, v in zip(self.node_t, self.node_values)],
            "extras": _jsonable(self.extras),
        }


def _num(v):
    if v is None:
        return None
    v = float(v)
    return v if math.isfinite(v) else None


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (float, np.floating, int, np.integer)) and not isinstance(obj, bool):
        return _num(obj)
    return obj


@dataclass(frozen=True)
class ScanMode:
    """Strong scan (whole box) or weak scan with radius ``delta / 2``."""

    kind: str = "strong"
    delta: float | None = None

    def __post_init__(self):
        if self.kind not in ("strong", "weak"):
            raise ValueError("scan mode must be 'strong' or 'weak'")
        if self.kind == "weak" and not (self.delta is not None and self.delta > 0):
            raise ValueError("weak mode needs a positive delta")

    @classmethod
    def strong(cls) -> ScanMode:
        return cls("strong")

    @classmethod
    def weak(cls, delta: float) -> ScanMode:
        return cls("weak", float(delta))


@dataclass(frozen=True)
class ScanSpec:
    """Per-axis xi grid of ``2m+1`` points and the a/b ratios for abxi scans."""

    m: int = 20
    ratios: tuple[float, ...] = (0.1, 0.2, 0.5, 0.8, 1.0, 1.25, 2.0, 5.0, 10.0)
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if not self.ratios or min(self.ratios) <= 0:
            raise ValueError("ratios must be positive")


# --------------------------------------------------------------------------
# shared helpers


def _check_orders(problem: Problem, traj: FracTrajectory):
    if abs(traj.alpha - problem.orders.alpha) > 1e-15:
        raise ValueError("trajectory alpha differs from the problem's alpha")
    if traj.dim != problem.n:
        raise ValueError("trajectory dimension differs from the problem's n")


def _noncorner(traj: FracTrajectory) -> np.ndarray:
    mask = np.ones(traj.grid.nodes.size, bool)
    mask[list(traj.psi.corners)] = False
    return mask


def _top(values, make, count=MAX_WITNESSES, largest=True):
    """Witnesses for the ``count`` extreme entries (stable ordering)."""
    values = np.asarray(values, float)
    order = np.argsort(-values if largest else values, kind="stable")[:count]
    return tuple(make(int(i)) for i in order)


def _state_at(traj: FracTrajectory, tau: float):
    """``(x(tau), psi(tau))`` with tau required to avoid corners."""
    nodes = traj.grid.nodes
    lo, hi = traj.grid.interval.t0, traj.grid.interval.t1
    if not lo <= tau <= hi:
        raise ValueError(f"tau = {tau} outside the interval")
    j = int(np.argmin(np.abs(nodes - tau)))
    if abs(nodes[j] - tau) <= 1e-12 * traj.grid.interval.length:
        if j in traj.psi.corners:
            raise ValueError(f"tau = {tau} is a corner point")
        return traj.x_nodes[j], traj.psi.values[j]
    return reconstruct(traj, [tau])[0], traj.psi(tau)[0]


# --------------------------------------------------------------------------
# Euler-Lagrange


def _dual_weights(nodes: np.ndarray) -> np.ndarray:
    h = np.diff(nodes)
    w = np.zeros(nodes.size)
    w[:-1] += 0.5 * h
    w[1:] += 0.5 * h
    return w


def el_residual(problem: Problem, traj: FracTrajectory, tol: float = DEFAULT_TOL,
                lagrangian=None) -> ConditionReport:
    """Residual of the fractional Euler-Lagrange integral equation.

    Super regime (beta > alpha)::

        r(t) = (t1-t)^(1-alpha) (I^alpha_{t1-} b)(t) + (t1-t)^(beta-alpha) L_y

    Sub regime (beta <= alpha)::

        r(t) = (t1-t)^(1-beta) (I^alpha_{t1-} b)(t) + L_y - k (t1-t)^(alpha-beta) / Gamma(alpha)

    with ``b = (t1-t)^(beta-1) L_x`` and ``k`` fitted by weighted least squares.
    """
    _check_orders(problem, traj)
    expr = problem.effective_lagrangian() if lagrangian is None else lagrangian
    alpha, beta = problem.orders.alpha, problem.orders.beta
    regime = problem.orders.regime()
    nodes = traj.grid.nodes
    t1 = traj.grid.interval.t1
    N = nodes.size - 1
    t, x, y = trajectory_points(traj)
    jets = eval_jets(expr, t, x, y, order=1)
    keep = _noncorner(traj)
    name = "euler_lagrange"

    bad = jets.nonsmooth_x.any(axis=1)
    bad[: N + 1] |= jets.nonsmooth_y[: N + 1].any(axis=1) & keep
    if bad.any():
        where = np.nonzero(bad)[0]
        wit = tuple(Witness(float("nan"), t=float(t[i]), kind="nonsmooth") for i in where[:MAX_WITNESSES])
        return ConditionReport(
            name, regime, Verdict.INCONCLUSIVE, float("nan"), None, wit,
            (f"L_x or L_y not differentiable at {where.size} point(s)",))

    notes = []
    idx = np.nonzero(keep[:N])[0]
    if regime is Regime.SUPER and beta < 1.0 and idx.size and idx[-1] == N - 1:
        idx = idx[:-1]
        notes.append(f"node t = {nodes[N - 1]:.17g} adjacent to t1 excluded (beta < 1)")
    notes.append("final node t1 excluded")
    g = sample_from_points(traj, jets.grad_x)
    tj = nodes[idx]
    s = (t1 - tj)[:, None]
    right = rl_integral_right_weighted(g, alpha, beta, tj)
    Ly = jets.grad_y[idx]
    fitted = None
    if regime is Regime.SUPER:
        res = s ** (1.0 - alpha) * right + s ** (beta - alpha) * Ly
    else:
        lhs = s ** (1.0 - beta) * right + Ly
        phi = s ** (alpha - beta) / gamma(alpha)
        w = _dual_weights(nodes)[idx][:, None]
        k = np.sum(w * phi * lhs, axis=0) / np.sum(w * phi * phi, axis=0)
        res = lhs - phi * k
        fitted = tuple(float(v) for v in k)
        if np.any(np.abs(k) < tol):
            notes.append("fitted k is zero within tolerance (k != 0 is not enforced)")
    per_node = np.max(np.abs(res), axis=1) if res.size else np.zeros(0)
    sup = float(per_node.max()) if per_node.size else 0.0
    verdict = Verdict.SATISFIED if sup <= tol else Verdict.VIOLATED
    wit = _top(per_node, lambda i: Witness(float(per_node[i]), t=float(tj[i]), kind="residual"))
    return ConditionReport(name, regime, verdict, sup, fitted, wit, tuple(notes), tj, per_node,
                           {"tol": tol, "nodes_checked": int(idx.size)})


def isoperimetric_el_residual(problem: Problem, traj: FracTrajectory, tol: float = DEFAULT_TOL,
                              constraint_tol: float | None = None) -> ConditionReport:
    """Euler-Lagrange residual of ``mu0 L0 + sum mu_i L_i`` plus constraint residuals.

    A constraint residual above ``constraint_tol`` (default ``tol``) also
    makes the verdict violated.
    """
    ctol = tol if constraint_tol is None else constraint_tol
    if not problem.constraints:
        raise ValueError("problem has no isoperimetric constraints")
    m = problem.multipliers
    if m is None:
        raise ValueError("multipliers must be set")
    if m.mu0 == 0 and all(v == 0 for v in m.mu):
        raise ValueError("multipliers must not all vanish")
    base = el_residual(problem, traj, tol)
    cres = [weighted_functional(problem, traj, c.lagrangian) - c.value for c in problem.constraints]
    wit = list(base.witnesses)
    verdict = base.verdict
    for i, r in enumerate(cres):
        if abs(r) > ctol:
            wit.insert(0, Witness(float(r), kind=f"constraint_{i + 1}"))
            if verdict is Verdict.SATISFIED:
                verdict = Verdict.VIOLATED
    extras = dict(base.extras)
    extras["constraint_residuals"] = [float(r) for r in cres]
    extras["constraint_tol"] = ctol
    extras["multipliers"] = {"mu0": m.mu0, "mu": list(m.mu)}
    return ConditionReport("isoperimetric_euler_lagrange", base.regime, verdict, base.residual_sup,
                           base.fitted_k, tuple(wit), base.notes, base.node_t, base.node_values, extras)


# --------------------------------------------------------------------------
# Weierstrass and the (a, b, xi)-inequality


def _abxi_values(expr, tau, x, y, a, b, xi) -> np.ndarray:
    """(a, b, xi)-inequality left side for broadcast rows of (tau, x, y, a, b, xi)."""
    P = xi.shape[0]
    tt = np.broadcast_to(tau, (P,))
    xx = np.broadcast_to(x, (P, x.shape[-1]))
    yy = np.broadcast_to(y, (P, y.shape[-1]))
    r = (a / b)[:, None]
    L = evaluate(expr, np.concatenate([tt, tt, tt]), np.vstack([xx, xx, xx]),
                 np.vstack([yy + xi, yy - xi * r, yy]))
    return a * L[:P] + b * L[P:2 * P] - (a + b) * L[2 * P:]


def abxi_inequality(problem: Problem, traj: FracTrajectory, tau: float, a: float, b: float, xi) -> float:
    """``a L(y+xi) + b L(y - xi a/b) - (a+b) L(y)`` at ``tau``; negative means violated."""
    _check_orders(problem, traj)
    if not (a > 0 and b > 0):
        raise ValueError("a and b must be positive")
    xi = np.atleast_1d(np.asarray(xi, float))
    if xi.shape != (problem.n,):
        raise ValueError("xi must have dimension n")
    x, y = _state_at(traj, float(tau))
    val = _abxi_values(problem.effective_lagrangian(), np.array([float(tau)]), x[None], y[None],
                       np.array([float(a)]), np.array([float(b)]), xi[None])
    return float(val[0])


def abxi_profile(problem: Problem, traj: FracTrajectory, a: float, b: float, xi,
                 tol: float = DEFAULT_TOL, tau: float | None = None) -> ConditionReport:
    """The (a, b, xi)-inequality for fixed parameters at every non-corner node (or at ``tau``)."""
    _check_orders(problem, traj)
    if not (a > 0 and b > 0):
        raise ValueError("a and b must be positive")
    xi = np.atleast_1d(np.asarray(xi, float))
    if xi.shape != (problem.n,):
        raise ValueError("xi must have dimension n")
    if tau is None:
        idx = np.nonzero(_noncorner(traj))[0]
        tj = traj.grid.nodes[idx]
        xs, ys = traj.x_nodes[idx], traj.psi.values[idx]
    else:
        x, y = _state_at(traj, float(tau))
        tj, xs, ys = np.array([float(tau)]), x[None], y[None]
    P = tj.size
    vals = np.array([
        _abxi_values(problem.effective_lagrangian(), tj[i:i + 1], xs[i:i + 1], ys[i:i + 1],
                     np.array([float(a)]), np.array([float(b)]), xi[None])[0]
        for i in range(P)])
    worst = float(vals.min())
    verdict = Verdict.VIOLATED if worst < -tol else Verdict.SATISFIED
    xit = tuple(float(v) for v in xi)
    wit = _top(vals, lambda i: Witness(float(vals[i]), t=float(tj[i]), a=float(a), b=float(b), xi=xit,
                                       kind="abxi"), largest=False)
    if verdict is Verdict.SATISFIED:
        wit = wit[:1]
    return ConditionReport("abxi", problem.orders.regime(), verdict, max(0.0, -worst), None, wit,
                           (f"fixed a = {float(a):.17g}, b = {float(b):.17g}",), tj, vals,
                           {"tol": tol, "a": float(a), "b": float(b), "xi": list(xit)})


def weierstrass_gap(problem: Problem, traj: FracTrajectory, tau: float, z) -> float:
    """``E = L(z) - L(y) - <L_y(y), z - y>`` at ``tau`` with ``y = psi(tau)``."""
    _check_orders(problem, traj)
    z = np.atleast_1d(np.asarray(z, float))
    x, y = _state_at(traj, float(tau))
    expr = problem.effective_lagrangian()
    jet = eval_jets(expr, [tau], x[None], y[None], order=1)
    if jet.nonsmooth_y.any():
        raise NonSmoothError(f"L_y does not exist at tau = {tau}; use abxi_inequality instead")
    Lz = evaluate(expr, [tau], x[None], z[None])[0]
    return float(Lz - jet.value[0] - jet.grad_y[0] @ (z - y))


def _xi_grid(n: int, radius: float, m: int) -> np.ndarray:
    axis = np.linspace(-radius, radius, 2 * m + 1)
    mesh = np.meshgrid(*([axis] * n), indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=1)


def _scan_radius(traj: FracTrajectory, mode: ScanMode) -> float:
    if mode.kind == "strong":
        return 2.0 * (1.0 + float(np.max(np.linalg.norm(traj.psi.all_values(), axis=1))))
    return 0.5 * mode.delta


def _ratios(mode: ScanMode, samples: ScanSpec) -> np.ndarray:
    r = np.array(sorted(samples.ratios), float)
    if mode.kind == "weak":
        r = r[r < 1.0]
        if r.size == 0:
            raise ValueError("weak mode needs at least one ratio a/b < 1")
    return r


def _node_abxi(expr, tj, x, y, xis, ratios):
    """Minimum (a, b, xi)-inequality value at one node over ratios x xi grid and its arguments."""
    Q = xis.shape[0]
    a = np.repeat(ratios, Q)
    xi = np.tile(xis, (ratios.size, 1))
    vals = _abxi_values(expr, np.array([tj]), x[None], y[None], a, np.ones_like(a), xi)
    i = int(np.argmin(vals))
    return float(vals[i]), float(a[i]), tuple(float(v) for v in xi[i])


def _node_gap(expr, tj, x, y, ly, xis):
    Q = xis.shape[0]
    z = y[None] + xis
    Lz = evaluate(expr, np.full(Q, tj), np.broadcast_to(x, (Q, x.size)), z)
    Ly0 = evaluate(expr, [tj], x[None], y[None])[0]
    vals = Lz - Ly0 - xis @ ly
    i = int(np.argmin(vals))
    return float(vals[i]), tuple(float(v) for v in xis[i])


def weierstrass_scan(problem: Problem, traj: FracTrajectory, mode: ScanMode = ScanMode(),
                     samples: ScanSpec = ScanSpec()) -> ConditionReport:
    """Scan E over all non-corner nodes and a box of xi; abxi where L_y is missing."""
    return _scan(problem, traj, mode, samples, force_abxi=False)


def abxi_scan(problem: Problem, traj: FracTrajectory, mode: ScanMode = ScanMode(),
              samples: ScanSpec = ScanSpec()) -> ConditionReport:
    """Scan the derivative-free (a, b, xi)-inequality over nodes, ratios and xi."""
    return _scan(problem, traj, mode, samples, force_abxi=True)


def _scan(problem, traj, mode, samples, force_abxi):
    _check_orders(problem, traj)
    expr = problem.effective_lagrangian()
    regime = problem.orders.regime()
    nodes = traj.grid.nodes
    idx = np.nonzero(_noncorner(traj))[0]
    xs = traj.x_nodes
    ys = traj.psi.values
    radius = _scan_radius(traj, mode)
    xis = _xi_grid(problem.n, radius, samples.m)
    ratios = _ratios(mode, samples)
    jets = eval_jets(expr, nodes[idx], xs[idx], ys[idx], order=1)
    use_abxi = np.ones(idx.size, bool) if force_abxi else jets.nonsmooth_y.any(axis=1)

    def work(k):
        j = idx[k]
        if use_abxi[k]:
            v, a, xi = _node_abxi(expr, nodes[j], xs[j], ys[j], xis, ratios)
            return v, Witness(v, t=float(nodes[j]), a=a, b=1.0, xi=xi, kind="abxi")
        v, xi = _node_gap(expr, nodes[j], xs[j], ys[j], jets.grad_y[k], xis)
        return v, Witness(v, t=float(nodes[j]), xi=xi, kind="weierstrass")

    results = ordered_map(work, range(idx.size))
    per_node = np.array([r[0] for r in results])
    worst = float(per_node.min()) if per_node.size else 0.0
    verdict = Verdict.VIOLATED if worst < -samples.tol else Verdict.SATISFIED
    wit = _top(per_node, lambda i: results[i][1], largest=False)
    if verdict is Verdict.SATISFIED:
        wit = wit[:1]
    notes = [f"{mode.kind} scan: xi box [-{radius:.6g}, {radius:.6g}]^{problem.n}, "
             f"{2 * samples.m + 1} points per axis"]
    n_abxi = int(use_abxi.sum())
    if n_abxi:
        notes.append(f"(a,b,xi) inequality used at {n_abxi} node(s), a/b in "
                     f"{[float(r) for r in ratios]}")
    name = "abxi" if force_abxi else "weierstrass"
    extras = {"mode": mode.kind, "radius": radius, "tol": samples.tol}
    if mode.delta is not None:
        extras["delta"] = mode.delta
    return ConditionReport(name, regime, verdict, max(0.0, -worst), None, wit, tuple(notes),
                           nodes[idx], per_node, extras)


# --------------------------------------------------------------------------
# Legendre and corners


def legendre_check(problem: Problem, traj: FracTrajectory, tol: float = DEFAULT_TOL) -> ConditionReport:
    """Minimum eigenvalue of ``L_yy`` at every non-corner node."""
    _check_orders(problem, traj)
    expr = problem.effective_lagrangian()
    regime = problem.orders.regime()
    idx = np.nonzero(_noncorner(traj))[0]
    tj = traj.grid.nodes[idx]
    jets = eval_jets(expr, tj, traj.x_nodes[idx], traj.psi.values[idx], order=2)
    rough = jets.nonsmooth_hess.reshape(idx.size, -1).any(axis=1)
    lam = np.full(idx.size, np.nan)
    vec = np.full((idx.size, problem.n), np.nan)
    ok = ~rough
    if ok.any():
        w, v = np.linalg.eigh(jets.hess_yy[ok])
        lam[ok] = w[:, 0]
        vec[ok] = v[:, :, 0]
    notes = []
    if rough.any():
        notes.append(f"L_yy not defined at {int(rough.sum())} node(s); those nodes are inconclusive")
    finite = np.where(ok, lam, np.inf)
    worst = float(finite.min()) if ok.any() else float("nan")
    if ok.any() and worst < -tol:
        verdict = Verdict.VIOLATED
    elif rough.any():
        verdict = Verdict.INCONCLUSIVE
    else:
        verdict = Verdict.SATISFIED

    def make(i):
        if rough[i]:
            return Witness(float("nan"), t=float(tj[i]), kind="nonsmooth")
        return Witness(float(lam[i]), t=float(tj[i]), mu=tuple(float(c) for c in vec[i]), kind="lambda_min")

    wit = _top(finite, make, largest=False)
    if rough.any():
        wit = wit + tuple(make(int(i)) for i in np.nonzero(rough)[0][:MAX_WITNESSES])
    extras = {"tol": tol}
    if ok.any():
        extras["lambda_min"] = worst
        extras["lambda_min_max"] = float(lam[ok].max())
    residual = max(0.0, -worst) if ok.any() else float("nan")
    return ConditionReport("legendre", regime, verdict, residual, None, wit, tuple(notes), tj, lam, extras)


def corner_conditions(problem: Problem, traj: FracTrajectory, tol: float = DEFAULT_TOL) -> ConditionReport:
    """Jumps of ``L_y`` and of ``L - <L_y, y>`` across every corner."""
    _check_orders(problem, traj)
    expr = problem.effective_lagrangian()
    regime = problem.orders.regime()
    corners = list(traj.psi.corners)
    if not corners:
        return ConditionReport("corners", regime, Verdict.SATISFIED, 0.0, None, (),
                               ("trajectory has no corners",))
    tc = traj.grid.nodes[corners]
    xc = traj.x_nodes[corners]
    yl = traj.psi.left_values
    yr = traj.psi.values[corners]
    jets = eval_jets(expr, np.concatenate([tc, tc]), np.vstack([xc, xc]), np.vstack([yl, yr]), order=1)
    K = len(corners)
    rough = jets.nonsmooth_y[:K].any(axis=1) | jets.nonsmooth_y[K:].any(axis=1)
    if rough.any():
        wit = tuple(Witness(float("nan"), t=float(tc[i]), kind="nonsmooth") for i in np.nonzero(rough)[0])
        return ConditionReport("corners", regime, Verdict.INCONCLUSIVE, float("nan"), None, wit,
                               ("L_y does not exist at a corner",))
    Ly = jets.grad_y
    H = jets.value - np.sum(Ly * np.vstack([yl, yr]), axis=1)
    d1 = Ly[:K] - Ly[K:]
    d2 = H[:K] - H[K:]
    n1 = np.max(np.abs(d1), axis=1)
    per = np.maximum(n1, np.abs(d2))
    sup = float(per.max())
    verdict = Verdict.SATISFIED if sup <= tol else Verdict.VIOLATED
    wit = []
    for i in np.argsort(-per, kind="stable")[:MAX_WITNESSES]:
        c = int(np.argmax(np.abs(d1[i])))
        wit.append(Witness(float(d1[i, c]), t=float(tc[i]), kind=f"delta1[{c + 1}]"))
        wit.append(Witness(float(d2[i]), t=float(tc[i]), kind="delta2"))
    extras = {"delta1": d1.tolist(), "delta2": d2.tolist(), "tol": tol}
    return ConditionReport("corners", regime, verdict, sup, None, tuple(wit), (), tc, per, extras)
