"""The fractional variational problem and its isoperimetric extension."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .fracops import Interval, Orders
from .lagrange import LagrangianExpr, combine

DEFAULT_ENDPOINT_TOL = 1e-6


@dataclass(frozen=True)
class Constraint:
    """Isoperimetric constraint ``int (t1-t)^(beta-1) L_i dt = value``."""

    lagrangian: LagrangianExpr
    value: float


@dataclass(frozen=True)
class Multipliers:
    mu0: float
    mu: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "mu0", float(self.mu0))
        object.__setattr__(self, "mu", tuple(float(m) for m in np.atleast_1d(self.mu)))


@dataclass(frozen=True, eq=False)
class Problem:
    """Minimize the beta-weighted functional over x with fixed endpoints."""

    orders: Orders
    interval: Interval
    n: int
    lagrangian: LagrangianExpr
    x0: np.ndarray
    x1: np.ndarray
    constraints: tuple[Constraint, ...] = ()
    multipliers: Multipliers | None = None
    endpoint_tol: float = DEFAULT_ENDPOINT_TOL
    _effective: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        x0 = np.array(np.atleast_1d(self.x0), dtype=float)
        x1 = np.array(np.atleast_1d(self.x1), dtype=float)
        if x0.shape != (self.n,) or x1.shape != (self.n,):
            raise ValueError("boundary values must have dimension n")
        if not (np.all(np.isfinite(x0)) and np.all(np.isfinite(x1))):
            raise ValueError("boundary values must be finite")
        if self.lagrangian.n != self.n or any(c.lagrangian.n != self.n for c in self.constraints):
            raise ValueError("expressions must have dimension n")
        x0.setflags(write=False)
        x1.setflags(write=False)
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "x1", x1)
        object.__setattr__(self, "constraints", tuple(self.constraints))
        m = self.multipliers
        if m is not None:
            if len(m.mu) != len(self.constraints):
                raise ValueError("need one multiplier per constraint")
            if m.mu0 == 0 and all(v == 0 for v in m.mu):
                raise ValueError("multipliers must not all vanish")

    def effective_lagrangian(self) -> LagrangianExpr:
        """``mu0 L0 + sum mu_i L_i`` when multipliers are set, else ``L0``."""
        if self.multipliers is None or not self.constraints:
            return self.lagrangian
        if "L" not in self._effective:
            m = self.multipliers
            terms = [(m.mu0, self.lagrangian)]
            terms += [(mu, c.lagrangian) for mu, c in zip(m.mu, self.constraints)]
            self._effective["L"] = combine(terms, self.n)
        return self._effective["L"]

    def with_multipliers(self, mu0: float, mu) -> Problem:
        return replace(self, multipliers=Multipliers(mu0, tuple(np.atleast_1d(mu))), _effective={})

    def unconstrained(self, lagrangian: LagrangianExpr) -> Problem:
        """Same orders and endpoints with a new Lagrangian and no constraints."""
        return replace(self, lagrangian=lagrangian, constraints=(), multipliers=None, _effective={})
