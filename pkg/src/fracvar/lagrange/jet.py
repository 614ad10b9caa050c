"""Forward-mode evaluation of L, its (x, y)-gradient and y-Hessian.

A jet over ``P`` points carries the value ``v`` (P,), gradient ``g`` (P, 2n)
ordered as ``(x1..xn, y1..yn)`` and ``H`` (P, n, n), the Hessian in ``y``
(or (P, 2n, 2n) over all of ``(x, y)`` on request).  Derivatives that do not
exist at a point are replaced by NaN and recorded in boolean masks ``sg`` and
``sh`` instead of being invented.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import digamma, gamma, polygamma

from ..errors import LagrangianDomainError
from .parser import BinOp, Call, LagrangianExpr, Neg, Num, Var, is_constant


@dataclass(frozen=True)
class JetValue:
    """L and its partial derivatives at one point."""

    value: float
    grad_x: np.ndarray
    grad_y: np.ndarray
    hess_yy: np.ndarray
    nonsmooth_x: np.ndarray
    nonsmooth_y: np.ndarray
    nonsmooth_hess: np.ndarray

    @property
    def smooth(self) -> bool:
        return not (self.nonsmooth_x.any() or self.nonsmooth_y.any() or self.nonsmooth_hess.any())


@dataclass(frozen=True)
class JetBatch:
    """Jets at ``P`` points; row ``p`` corresponds to the ``p``-th input."""

    value: np.ndarray
    grad_x: np.ndarray | None
    grad_y: np.ndarray | None
    hess_yy: np.ndarray | None
    nonsmooth_x: np.ndarray | None
    nonsmooth_y: np.ndarray | None
    nonsmooth_hess: np.ndarray | None

    def __getitem__(self, p: int) -> JetValue:
        return JetValue(float(self.value[p]), self.grad_x[p], self.grad_y[p], self.hess_yy[p],
                        self.nonsmooth_x[p], self.nonsmooth_y[p], self.nonsmooth_hess[p])


class _Jet:
    __slots__ = ("v", "g", "H", "sg", "sh")

    def __init__(self, v, g=None, H=None, sg=None, sh=None):
        self.v, self.g, self.H, self.sg, self.sh = v, g, H, sg, sh


class _Evaluator:
    def __init__(self, n: int, t, x, y, order: int, full: bool = False):
        self.n = n
        self.order = order
        # second derivatives are tracked for gradient columns hoff: onward
        self.hoff = 0 if full else n
        self.m = 2 * n - self.hoff
        self.t, self.x, self.y = t, x, y
        self.P = t.shape[0]

    # constructors -------------------------------------------------------
    def const(self, v):
        v = np.broadcast_to(np.asarray(v, float), (self.P,)).copy()
        if self.order == 0:
            return _Jet(v)
        n, P = self.n, self.P
        g = np.zeros((P, 2 * n))
        sg = np.zeros((P, 2 * n), bool)
        if self.order == 1:
            return _Jet(v, g, None, sg)
        m = self.m
        return _Jet(v, g, np.zeros((P, m, m)), sg, np.zeros((P, m, m), bool))

    def var(self, node: Var):
        if node.kind == "t":
            return self.const(self.t)
        src = self.x if node.kind == "x" else self.y
        jet = self.const(src[:, node.index])
        if self.order:
            col = node.index + (self.n if node.kind == "y" else 0)
            jet.g[:, col] = 1.0
        return jet

    # helpers ------------------------------------------------------------
    def _gy(self, jet):
        return jet.g[:, self.hoff:]

    def _outer_or(self, a, b):
        return a[:, :, None] | b[:, None, :]

    def _fail(self, node, mask, what):
        p = int(np.nonzero(mask)[0][0])
        raise LagrangianDomainError(
            f"{what} at offset {node.pos} (point {p})", node.pos, p)

    # algebra ------------------------------------------------------------
    def add(self, a, b, sign=1.0):
        v = a.v + sign * b.v
        if self.order == 0:
            return _Jet(v)
        g = a.g + sign * b.g
        sg = a.sg | b.sg
        if self.order == 1:
            return _Jet(v, g, None, sg)
        return _Jet(v, g, a.H + sign * b.H, sg, a.sh | b.sh)

    def mul(self, a, b):
        v = a.v * b.v
        if self.order == 0:
            return _Jet(v)
        g = a.g * b.v[:, None] + b.g * a.v[:, None]
        sg = a.sg | b.sg
        if self.order == 1:
            return _Jet(v, g, None, sg)
        ay, by = self._gy(a), self._gy(b)
        H = (a.H * b.v[:, None, None] + b.H * a.v[:, None, None]
             + ay[:, :, None] * by[:, None, :] + by[:, :, None] * ay[:, None, :])
        sy = sg[:, self.hoff:]
        sh = a.sh | b.sh | self._outer_or(sy, sy)
        return _Jet(v, g, H, sg, sh)

    def chain(self, a, f, d1, d2):
        """Apply a scalar function with value ``f`` and derivatives ``d1``, ``d2``."""
        if self.order == 0:
            return _Jet(f)
        bad1 = ~np.isfinite(d1)
        live = (a.g != 0) | a.sg
        sg = a.sg | (bad1[:, None] & live)
        d1s = np.where(bad1, 0.0, d1)
        g = np.where(sg, np.nan, d1s[:, None] * a.g)
        if self.order == 1:
            return _Jet(f, g, None, sg)
        ay = self._gy(a)
        live_y = live[:, self.hoff:]
        bad2 = ~np.isfinite(d2) | bad1
        sy = sg[:, self.hoff:]
        sh = a.sh | self._outer_or(sy, sy) | (bad2[:, None, None] & self._outer_or(live_y, live_y))
        d2s = np.where(bad2, 0.0, d2)
        ay = np.where(sy, 0.0, ay)
        with np.errstate(invalid="ignore"):
            H = d1s[:, None, None] * np.where(a.sh, 0.0, a.H) + d2s[:, None, None] * ay[:, :, None] * ay[:, None, :]
        H = np.where(sh, np.nan, H)
        return _Jet(f, g, H, sg, sh)

    # node dispatch ------------------------------------------------------
    def eval(self, node):
        if isinstance(node, Num):
            return self.const(node.value)
        if isinstance(node, Var):
            return self.var(node)
        if isinstance(node, Neg):
            a = self.eval(node.operand)
            return self.add(self.const(0.0), a, -1.0)
        if isinstance(node, BinOp):
            return self.binop(node)
        return self.call(node)

    def binop(self, node: BinOp):
        if node.op == "^":
            return self.power(node)
        a = self.eval(node.left)
        b = self.eval(node.right)
        if node.op == "+":
            return self.add(a, b)
        if node.op == "-":
            return self.add(a, b, -1.0)
        if node.op == "*":
            return self.mul(a, b)
        return self.mul(a, self.reciprocal(b, node))

    def reciprocal(self, b, node):
        zero = b.v == 0
        if zero.any():
            self._fail(node, zero, "division by zero")
        v = 1.0 / b.v
        return self.chain(b, v, -v * v, 2.0 * v * v * v)

    def power(self, node: BinOp):
        base = self.eval(node.left)
        if is_constant(node.right):
            c = self.eval(node.right).v
            u = base.v
            integral = c == np.round(c)
            if np.any((u < 0) & ~integral):
                self._fail(node, (u < 0) & ~integral, "negative base with non-integer exponent")
            if np.any((u == 0) & (c < 0)):
                self._fail(node, (u == 0) & (c < 0), "division by zero (0 to a negative power)")
            with np.errstate(divide="ignore", invalid="ignore"):
                f = u**c
                d1 = np.where(c == 0, 0.0, c * u ** (c - 1.0))
                d2 = np.where((c == 0) | (c == 1), 0.0, c * (c - 1.0) * u ** (c - 2.0))
            return self.chain(base, f, d1, d2)
        expo = self.eval(node.right)
        bad = base.v <= 0
        if bad.any():
            self._fail(node, bad, "non-positive base with variable exponent")
        return self.exp_of(self.mul(expo, self.log_of(base)))

    def log_of(self, a):
        v = a.v
        return self.chain(a, np.log(v), 1.0 / v, -1.0 / (v * v))

    def exp_of(self, a):
        e = np.exp(a.v)
        return self.chain(a, e, e, e)

    def call(self, node: Call):
        a = self.eval(node.arg)
        u = a.v
        f = node.func
        if f == "sin":
            s, c = np.sin(u), np.cos(u)
            return self.chain(a, s, c, -s)
        if f == "cos":
            s, c = np.sin(u), np.cos(u)
            return self.chain(a, c, -s, -c)
        if f == "exp":
            return self.exp_of(a)
        if f == "ln":
            if np.any(u <= 0):
                self._fail(node, u <= 0, "ln of a non-positive value")
            return self.log_of(a)
        if f == "sqrt":
            if np.any(u < 0):
                self._fail(node, u < 0, "sqrt of a negative value")
            r = np.sqrt(u)
            with np.errstate(divide="ignore"):
                d1 = np.where(u == 0, np.inf, 0.5 / np.where(u == 0, 1.0, r))
                d2 = np.where(u == 0, np.inf, -0.25 / np.where(u == 0, 1.0, r * u))
            return self.chain(a, r, d1, d2)
        if f == "abs":
            kink = u == 0
            d1 = np.where(kink, np.nan, np.sign(u))
            d2 = np.where(kink, np.nan, 0.0)
            return self.chain(a, np.abs(u), d1, d2)
        # gamma
        pole = (u <= 0) & (u == np.round(u))
        if pole.any():
            self._fail(node, pole, "gamma at a pole")
        gv = gamma(u)
        if self.order == 0:
            return _Jet(gv)
        psi0 = digamma(u)
        d2 = gv * (psi0 * psi0 + polygamma(1, u)) if self.order == 2 else np.zeros_like(u)
        return self.chain(a, gv, gv * psi0, d2)


def _prepare(expr: LagrangianExpr, t, x, y):
    t = np.atleast_1d(np.asarray(t, float))
    P = t.shape[0]
    x = np.asarray(x, float).reshape(P, expr.n)
    y = np.asarray(y, float).reshape(P, expr.n)
    return t, x, y


def evaluate(expr: LagrangianExpr, t, x, y) -> np.ndarray:
    """Values of ``L`` at ``P`` points: ``t`` (P,), ``x`` and ``y`` (P, n)."""
    t, x, y = _prepare(expr, t, x, y)
    return _Evaluator(expr.n, t, x, y, 0).eval(expr.ast).v


def eval_jets(expr: LagrangianExpr, t, x, y, order: int = 2, full: bool = False) -> JetBatch:
    """Values, gradients and (for ``order=2``) y-Hessians at ``P`` points.

    With ``full=True`` the Hessian field holds the whole ``(2n, 2n)`` matrix
    over ``(x, y)`` instead of the ``y`` block.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    t, x, y = _prepare(expr, t, x, y)
    n = expr.n
    jet = _Evaluator(n, t, x, y, order, full).eval(expr.ast)
    if order == 1:
        return JetBatch(jet.v, jet.g[:, :n], jet.g[:, n:], None, jet.sg[:, :n], jet.sg[:, n:], None)
    H = 0.5 * (jet.H + np.swapaxes(jet.H, 1, 2))
    return JetBatch(jet.v, jet.g[:, :n], jet.g[:, n:], H, jet.sg[:, :n], jet.sg[:, n:], jet.sh)


def eval_jet(expr: LagrangianExpr, t: float, x, y) -> JetValue:
    """Jet of ``L`` at a single point ``(t, x, y)``."""
    return eval_jets(expr, [t], np.reshape(x, (1, -1)), np.reshape(y, (1, -1)))[0]
