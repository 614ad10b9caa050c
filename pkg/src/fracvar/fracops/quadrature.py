"""Product-integration rules for weakly singular kernels on a node set.

Every rule here integrates ``kernel(tau) * l(tau)`` where ``l`` is the
piecewise-linear interpolant of nodal data.  Rules are returned as a pair of
weight arrays ``(wa, wb)`` indexed by cell: ``wa[j]`` multiplies the value at
the left end of cell ``j`` (its right limit) and ``wb[j]`` the value at the
right end (its left limit).  This keeps corners exact: a jump at a node simply
feeds different values into the two neighbouring cells.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import gamma, roots_jacobi

GAUSS_POINTS = 16

_gl_x, _gl_w = np.polynomial.legendre.leggauss(GAUSS_POINTS)
# Gauss-Legendre on [0, 1].
GL_NODES = 0.5 * (_gl_x + 1.0)
GL_WEIGHTS = 0.5 * _gl_w


@lru_cache(maxsize=256)
def _jacobi_01(expo: float, at_left: bool) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights on [0, 1] for weight s**expo (at_left) or (1-s)**expo."""
    if at_left:
        x, w = roots_jacobi(GAUSS_POINTS, 0.0, expo)
    else:
        x, w = roots_jacobi(GAUSS_POINTS, expo, 0.0)
    # [-1, 1] -> [0, 1]: (1 +- x)^e dx = 2^(e+1) s^e ds
    return 0.5 * (x + 1.0), w / 2.0 ** (expo + 1.0)


def _is_smooth(expo: float) -> bool:
    return expo >= 0 and float(expo).is_integer()


def power_moments(t, a, u, p):
    """Moments of the kernel ``(t - tau)**(p - 1)`` over ``[a, u]``.

    Returns ``(m0, m1)`` with ``m0 = int (t-tau)^(p-1)`` and
    ``m1 = int (t-tau)^(p-1) (tau - a)``, elementwise over broadcast arrays
    with ``a <= u <= t``.  The closed forms cancel badly when the cell is tiny
    compared with its distance to ``t``; that regime switches to an
    expm1/Gauss form of the same integrals.
    """
    t, a, u = np.broadcast_arrays(np.asarray(t, float), np.asarray(a, float), np.asarray(u, float))
    w = u - a
    d = t - a
    m0 = np.zeros(w.shape)
    m1 = np.zeros(w.shape)
    live = w > 0
    if not np.any(live):
        return m0, m1
    w, d, du = w[live], d[live], (t - u)[live]
    rho = w / d
    far = rho <= 0.5
    r0 = np.empty_like(w)
    r1 = np.empty_like(w)

    if np.any(far):
        wf, df, rf = w[far], d[far], rho[far]
        r0[far] = -(df**p) * np.expm1(p * np.log1p(-rf)) / p
        s = GL_NODES[None, :]
        kern = (1.0 - rf[:, None] * s) ** (p - 1.0)
        r1[far] = wf**2 * df ** (p - 1.0) * ((kern * s) @ GL_WEIGHTS)
    near = ~far
    if np.any(near):
        dn, dun = d[near], du[near]
        r0[near] = (dn**p - dun**p) / p
        r1[near] = dn * r0[near] - (dn ** (p + 1.0) - dun ** (p + 1.0)) / (p + 1.0)

    m0[live] = r0
    m1[live] = r1
    return m0, m1


def left_weights(nodes: np.ndarray, t_eval: np.ndarray, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Cell weights of ``(I^alpha_{t0+} l)(t)`` for every ``t`` in ``t_eval``.

    Shapes are ``(len(t_eval), len(nodes) - 1)``.
    """
    nodes = np.asarray(nodes, float)
    t = np.asarray(t_eval, float)[:, None]
    a = nodes[None, :-1]
    b = nodes[None, 1:]
    h = b - a
    u = np.clip(t, a, b)
    m0, m1 = power_moments(t, a, u, alpha)
    g = gamma(alpha)
    wb = m1 / h / g
    wa = m0 / g - wb
    return wa, wb


def endpoint_weights(nodes: np.ndarray, beta: float) -> tuple[np.ndarray, np.ndarray]:
    """Cell weights of ``int_{t0}^{t1} (t1 - tau)^(beta-1) l(tau) dtau``."""
    nodes = np.asarray(nodes, float)
    a, b = nodes[:-1], nodes[1:]
    m0, m1 = power_moments(nodes[-1], a, b, beta)
    wb = m1 / (b - a)
    return m0 - wb, wb


def nodal(wa: np.ndarray, wb: np.ndarray) -> np.ndarray:
    """Collapse cell weights onto nodes (valid only for data without corners)."""
    out = np.zeros(wa.shape[:-1] + (wa.shape[-1] + 1,))
    out[..., :-1] += wa
    out[..., 1:] += wb
    return out


def singular_rule(a: float, b: float, points, exps, depth: int = 0):
    """Quadrature for ``int_a^b prod_i |tau - c_i|**e_i phi(tau) dtau``.

    Each ``c_i`` lies outside the open interval ``(a, b)``; factors touching an
    endpoint are absorbed into a Gauss-Jacobi weight, factors close to (but
    not at) the interval trigger geometric subdivision toward them.  Returns
    ``(x, w)`` such that the integral is ``sum(w * phi(x))``.
    """
    width = b - a
    tol = 1e-14 * max(1.0, abs(a), abs(b))
    left_e = right_e = 0.0
    touch_l = touch_r = False
    split_at = None
    for c, e in zip(points, exps):
        if _is_smooth(e):
            continue
        if abs(c - a) <= tol:
            left_e += e
            touch_l = True
        elif abs(c - b) <= tol:
            right_e += e
            touch_r = True
        else:
            dist = a - c if c < a else c - b
            if dist < width and depth < 60:
                cut = a + dist if c < a else b - dist
                if split_at is None or abs(cut - 0.5 * (a + b)) < abs(split_at - 0.5 * (a + b)):
                    split_at = cut
    if touch_l and touch_r:
        split_at = 0.5 * (a + b)
    if split_at is not None and depth < 60:
        x1, w1 = singular_rule(a, split_at, points, exps, depth + 1)
        x2, w2 = singular_rule(split_at, b, points, exps, depth + 1)
        return np.concatenate([x1, x2]), np.concatenate([w1, w2])

    if touch_l:
        s, ws = _jacobi_01(float(left_e), True)
        x = a + width * s
        w = ws * width ** (left_e + 1.0)
    elif touch_r:
        s, ws = _jacobi_01(float(right_e), False)
        x = a + width * s
        w = ws * width ** (right_e + 1.0)
    else:
        x = a + width * GL_NODES
        w = width * GL_WEIGHTS
    for c, e in zip(points, exps):
        if _is_smooth(e) and e == 0:
            continue
        if (touch_l and abs(c - a) <= tol) or (touch_r and abs(c - b) <= tol):
            continue
        w = w * np.abs(x - c) ** e
    return x, w


def _basis(s: np.ndarray, quadratic: bool):
    if quadratic:
        return ((1.0 - s) * (1.0 - 2.0 * s), 4.0 * s * (1.0 - s), s * (2.0 * s - 1.0))
    return (1.0 - s, s)


def kernel_weights(nodes: np.ndarray, lo: float, hi: float, points, exps, quadratic: bool = False):
    """Cell weights of ``int_lo^hi prod |tau - c_i|**e_i l(tau) dtau``.

    ``l`` is piecewise linear on ``nodes`` (weights ``(wa, wb)``) or, with
    ``quadratic=True``, piecewise quadratic through each cell's endpoints and
    midpoint (weights ``(wa, wm, wb)``).  ``[lo, hi]`` may cut through cells.
    Cells far from every singular point (distance at least the cell width) are
    handled by one vectorized 16-point Gauss-Legendre pass; the remainder go
    through :func:`singular_rule`.
    """
    nodes = np.asarray(nodes, float)
    a_full, b_full = nodes[:-1], nodes[1:]
    h = b_full - a_full
    out = [np.zeros(h.shape) for _ in range(3 if quadratic else 2)]
    lo_c = np.maximum(a_full, lo)
    hi_c = np.minimum(b_full, hi)
    live = hi_c > lo_c
    if not np.any(live):
        return tuple(out)
    width = hi_c - lo_c
    regular = live.copy()
    for c, e in zip(points, exps):
        if _is_smooth(e):
            continue
        dist = np.where(c <= lo_c, lo_c - c, c - hi_c)
        regular &= dist >= width

    idx = np.nonzero(regular)[0]
    if idx.size:
        x = lo_c[idx, None] + width[idx, None] * GL_NODES[None, :]
        k = np.ones_like(x)
        for c, e in zip(points, exps):
            if e != 0:
                k = k * np.abs(x - c) ** e
        k = k * (width[idx, None] * GL_WEIGHTS[None, :])
        frac = (x - a_full[idx, None]) / h[idx, None]
        for w, phi in zip(out, _basis(frac, quadratic)):
            w[idx] = np.sum(k * phi, axis=1)

    for j in np.nonzero(live & ~regular)[0]:
        x, wq = singular_rule(lo_c[j], hi_c[j], points, exps)
        frac = (x - a_full[j]) / h[j]
        for w, phi in zip(out, _basis(frac, quadratic)):
            w[j] = np.sum(wq * phi)
    return tuple(out)
