"""Immutable containers: orders, interval, grids and piecewise samples."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

MIN_CELLS = 8


class Regime(enum.Enum):
    SUPER = "super"
    SUB = "sub"


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Orders:
    """Caputo order ``alpha`` and weight order ``beta``."""

    alpha: float
    beta: float

    def __post_init__(self):
        a, b = float(self.alpha), float(self.beta)
        if not (math.isfinite(a) and 0.0 < a <= 1.0):
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not (math.isfinite(b) and b > 0.0):
            raise ValueError(f"beta must be positive and finite, got {self.beta}")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    def regime(self) -> Regime:
        return Regime.SUPER if self.beta > self.alpha else Regime.SUB


@dataclass(frozen=True)
class Interval:
    t0: float
    t1: float

    def __post_init__(self):
        t0, t1 = float(self.t0), float(self.t1)
        if not (math.isfinite(t0) and math.isfinite(t1)):
            raise ValueError("interval endpoints must be finite")
        if not t0 < t1:
            raise ValueError(f"need t0 < t1, got [{t0}, {t1}]")
        object.__setattr__(self, "t0", t0)
        object.__setattr__(self, "t1", t1)

    @property
    def length(self) -> float:
        return self.t1 - self.t0


@dataclass(frozen=True, eq=False)
class Grid:
    """Strictly increasing nodes covering an interval exactly."""

    interval: Interval
    nodes: np.ndarray
    grading_exponent: float = 1.0

    def __post_init__(self):
        nodes = _frozen(self.nodes)
        if nodes.ndim != 1 or nodes.size < MIN_CELLS + 1:
            raise ValueError(f"a grid needs at least {MIN_CELLS} cells")
        if nodes[0] != self.interval.t0 or nodes[-1] != self.interval.t1:
            raise ValueError("grid must start at t0 and end at t1")
        if not np.all(np.diff(nodes) > 0):
            raise ValueError("grid nodes must be strictly increasing")
        if not self.grading_exponent >= 1.0:
            raise ValueError("grading exponent must be >= 1")
        object.__setattr__(self, "nodes", nodes)

    @property
    def n_cells(self) -> int:
        return self.nodes.size - 1

    @property
    def h_max(self) -> float:
        return float(np.max(np.diff(self.nodes)))

    def insert(self, points) -> tuple[Grid, np.ndarray]:
        """Return a refined grid containing ``points`` and their node indices.

        A point closer than ``1e-13 * length`` to an existing interior node
        moves that node onto the point instead of creating a sliver cell.
        """
        pts = np.asarray(points, float).ravel()
        lo, hi = self.interval.t0, self.interval.t1
        if np.any(pts < lo) or np.any(pts > hi):
            raise ValueError("inserted points must lie in the interval")
        snap = 1e-13 * self.interval.length
        nodes = self.nodes.copy()
        fresh = []
        for p in pts:
            j = int(np.argmin(np.abs(nodes - p)))
            if abs(nodes[j] - p) <= snap:
                if 0 < j < nodes.size - 1:
                    nodes[j] = p
            else:
                fresh.append(p)
        nodes = np.unique(np.concatenate([nodes, fresh]))
        grid = Grid(self.interval, nodes, self.grading_exponent)
        idx = np.array([int(np.argmin(np.abs(nodes - p))) for p in pts], dtype=int)
        return grid, idx


def grading_exponent(orders: Orders) -> float:
    return min(4.0, 2.0 / min(orders.alpha, orders.beta, 1.0))


def make_graded_grid(interval: Interval, n_cells: int, orders: Orders,
                     exponent: float | None = None) -> Grid:
    """Two-sided graded mesh clustering toward both endpoints.

    The left half uses ``t0 + (L/2)(j/(N/2))**r``; the right half mirrors it.
    ``exponent`` overrides the automatic ``r = min(4, 2/min(alpha, beta, 1))``.
    """
    if int(n_cells) != n_cells or n_cells < MIN_CELLS or n_cells % 2:
        raise ValueError(f"n_cells must be an even integer >= {MIN_CELLS}, got {n_cells}")
    n_cells = int(n_cells)
    r = grading_exponent(orders) if exponent is None else float(exponent)
    if not r >= 1.0:
        raise ValueError("grading exponent must be >= 1")
    half = n_cells // 2
    t0, t1 = interval.t0, interval.t1
    mid = 0.5 * (t0 + t1)
    s = (np.arange(half + 1) / half) ** r
    left = t0 + 0.5 * interval.length * s
    right = t1 - 0.5 * interval.length * s[::-1]
    left[-1] = right[0] = mid
    nodes = np.concatenate([left, right[1:]])
    nodes[0], nodes[-1] = t0, t1
    return Grid(interval, nodes, r)


@dataclass(frozen=True, eq=False)
class PiecewiseSample:
    """Nodal samples of a piecewise-linear, possibly jumping, R^n function.

    ``values[j]`` is the value at node ``j`` (the right limit at a corner);
    ``left_values[i]`` is the left limit at ``corners[i]``.
    """

    grid: Grid
    values: np.ndarray
    corners: tuple[int, ...] = ()
    left_values: np.ndarray | None = None

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim == 1:
            vals = vals[:, None]
        if vals.ndim != 2 or vals.shape[0] != self.grid.nodes.size:
            raise ValueError("values must have one row per grid node")
        corners = tuple(int(c) for c in self.corners)
        if list(corners) != sorted(set(corners)):
            raise ValueError("corners must be sorted and unique")
        if corners and (corners[0] < 1 or corners[-1] > self.grid.n_cells - 1):
            raise ValueError("corners must be interior node indices")
        if corners:
            if self.left_values is None:
                raise ValueError("left_values required at corners")
            left = np.array(self.left_values, dtype=float).reshape(len(corners), vals.shape[1])
        else:
            left = np.zeros((0, vals.shape[1]))
        if not (np.all(np.isfinite(vals)) and np.all(np.isfinite(left))):
            raise ValueError("samples must be finite")
        vals.setflags(write=False)
        left.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "corners", corners)
        object.__setattr__(self, "left_values", left)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @cached_property
    def cell_values(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-cell endpoint data ``(fa, fb)``, each of shape ``(N, n)``."""
        fa = self.values[:-1]
        fb = self.values[1:].copy()
        for c, lv in zip(self.corners, self.left_values):
            fb[c - 1] = lv
        fb.setflags(write=False)
        return fa, fb

    def left_limit(self, j: int) -> np.ndarray:
        if j in self.corners:
            return self.left_values[self.corners.index(j)]
        return self.values[j]

    def all_values(self) -> np.ndarray:
        """Right values and left limits stacked together (for sup norms)."""
        return np.vstack([self.values, self.left_values])

    def __call__(self, t) -> np.ndarray:
        """Evaluate the interpolant (right-continuous at corners)."""
        t = np.atleast_1d(np.asarray(t, float))
        nodes = self.grid.nodes
        j = np.clip(np.searchsorted(nodes, t, side="right") - 1, 0, nodes.size - 2)
        fa, fb = self.cell_values
        lam = ((t - nodes[j]) / (nodes[j + 1] - nodes[j]))[:, None]
        out = (1.0 - lam) * fa[j] + lam * fb[j]
        at_end = t >= nodes[-1]
        out[at_end] = self.values[-1]
        return out

    def __add__(self, other: PiecewiseSample) -> PiecewiseSample:
        if other.grid is not self.grid and not np.array_equal(other.grid.nodes, self.grid.nodes):
            raise ValueError("samples live on different grids")
        corners = tuple(sorted(set(self.corners) | set(other.corners)))
        left = [self.left_limit(c) + other.left_limit(c) for c in corners]
        return PiecewiseSample(self.grid, self.values + other.values, corners,
                               np.array(left) if corners else None)

    def scaled(self, c: float) -> PiecewiseSample:
        return PiecewiseSample(self.grid, c * self.values, self.corners,
                               c * self.left_values if self.corners else None)

    def resample(self, grid: Grid) -> PiecewiseSample:
        """Transfer onto a refinement of this sample's grid, exactly."""
        old = self.grid.nodes
        idx = np.searchsorted(grid.nodes, old)
        if np.any(idx >= grid.nodes.size) or not np.array_equal(grid.nodes[idx], old):
            raise ValueError("target grid must contain every node of the source grid")
        vals = self(grid.nodes)
        corners = tuple(int(idx[c]) for c in self.corners)
        for c_new, c_old in zip(corners, self.corners):
            vals[c_new] = self.values[c_old]
        return PiecewiseSample(grid, vals, corners, self.left_values if corners else None)

    @classmethod
    def constant(cls, grid: Grid, value) -> PiecewiseSample:
        v = np.atleast_1d(np.asarray(value, float))
        return cls(grid, np.tile(v, (grid.nodes.size, 1)))

    @classmethod
    def from_function(cls, grid: Grid, fn, corners=(), left_fn=None) -> PiecewiseSample:
        """Sample ``fn`` (vectorized in t) at the nodes.

        At each corner index the left limit comes from ``left_fn`` when given,
        otherwise from ``fn`` just to the left of the node.
        """
        vals = np.asarray(fn(grid.nodes), float)
        if vals.ndim == 1:
            vals = vals[:, None]
        corners = tuple(int(c) for c in corners)
        if not corners:
            return cls(grid, vals)
        tc = grid.nodes[list(corners)]
        if left_fn is None:
            delta = 1e-9 * grid.interval.length
            left = np.asarray(fn(tc - delta), float)
        else:
            left = np.asarray(left_fn(tc), float)
        return cls(grid, vals, corners, left.reshape(len(corners), vals.shape[1]))


def snap_corners(grid: Grid, times) -> tuple[tuple[int, ...], np.ndarray]:
    """Nearest interior node for each requested corner time and the snap distance."""
    times = np.atleast_1d(np.asarray(times, float))
    interior = grid.nodes[1:-1]
    idx = np.array([int(np.argmin(np.abs(interior - t))) + 1 for t in times], dtype=int)
    dist = np.abs(grid.nodes[idx] - times) if times.size else np.zeros(0)
    return tuple(int(i) for i in idx), dist


@dataclass(frozen=True, eq=False)
class FracTrajectory:
    """``x(t) = x0 + (I^alpha psi)(t)`` with ``psi`` the Caputo derivative."""

    x0: np.ndarray
    psi: PiecewiseSample
    alpha: float
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        x0 = _frozen(np.atleast_1d(self.x0))
        if x0.shape != (self.psi.dim,):
            raise ValueError("x0 dimension must match psi")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def grid(self) -> Grid:
        return self.psi.grid

    @property
    def dim(self) -> int:
        return self.psi.dim

    @property
    def x_nodes(self) -> np.ndarray:
        """Reconstructed state at every node, shape ``(N+1, n)``."""
        if "x" not in self._cache:
            from .operators import rl_integral_left

            x = self.x0 + rl_integral_left(self.psi, self.alpha, self.grid.nodes)
            x[0] = self.x0
            x.setflags(write=False)
            self._cache["x"] = x
        return self._cache["x"]
