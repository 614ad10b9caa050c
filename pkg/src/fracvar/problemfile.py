"""JSON problem files: schema, loading and content digests."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import jsonschema
import numpy as np

from .errors import FracvarError, LagrangianDomainError, ParseError
from .fracops import FracTrajectory, Grid, Interval, Orders, PiecewiseSample, make_graded_grid
from .lagrange import evaluate, parse_lagrangian
from .problem import Constraint, Multipliers, Problem

DEFAULT_CELLS = 128

_NUMBER = {"type": "number"}
_VECTOR = {"type": "array", "items": _NUMBER, "minItems": 1}
_EXPR = {"type": "string", "pattern": "^expr:"}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["alpha", "beta", "interval", "n", "lagrangian", "x0", "x1"],
    "properties": {
        "alpha": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "beta": {"type": "number", "exclusiveMinimum": 0},
        "interval": {"type": "array", "items": _NUMBER, "minItems": 2, "maxItems": 2},
        "n": {"type": "integer", "minimum": 1},
        "lagrangian": {"type": "string", "minLength": 1},
        "x0": _VECTOR,
        "x1": _VECTOR,
        "constraints": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["lagrangian", "value"],
                "properties": {"lagrangian": {"type": "string", "minLength": 1}, "value": _NUMBER},
            },
        },
        "multipliers": {
            "type": "object",
            "additionalProperties": False,
            "required": ["mu0", "mu"],
            "properties": {"mu0": _NUMBER, "mu": {"type": "array", "items": _NUMBER}},
        },
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "cells": {"type": "integer", "minimum": 8, "multipleOf": 2},
                "grading": {"oneOf": [{"const": "auto"}, {"type": "number", "minimum": 1}]},
            },
        },
        "trajectory": {
            "type": "object",
            "additionalProperties": False,
            "required": ["psi"],
            "properties": {
                "x0": _VECTOR,
                "psi": {
                    "oneOf": [
                        _EXPR,
                        {"type": "array", "items": _EXPR, "minItems": 1},
                        {"type": "array", "minItems": 2,
                         "items": {"type": "array", "items": _NUMBER, "minItems": 2}},
                    ]
                },
                "corners": {"type": "array", "items": _NUMBER},
            },
        },
    },
}

_HINTS = {
    "alpha": "alpha must lie in (0, 1]",
    "beta": "beta must be positive",
    "n": "n must be a positive integer",
    "cells": "grid cells must be an even integer >= 8",
    "grading": "grading must be \"auto\" or a number >= 1",
}


class ProblemFileError(FracvarError):
    """Invalid problem file; ``location`` names the field, line or offset."""

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


@dataclass(frozen=True, eq=False)
class LoadedProblem:
    document: dict
    digest: str
    problem: Problem
    grid: Grid
    trajectory: FracTrajectory | None
    snap: np.ndarray


def _reject_constant(name):
    raise ValueError(f"non-finite number {name} is not allowed")


def _finite_float(text):
    v = float(text)
    if not np.isfinite(v):
        raise ValueError(f"number {text} overflows to a non-finite value")
    return v


def read_document(path) -> dict:
    """Parse JSON text; non-finite literals and syntax errors raise with line/column."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ProblemFileError(f"cannot read file: {exc.strerror}", str(path)) from exc
    try:
        return json.loads(text, parse_constant=_reject_constant, parse_float=_finite_float)
    except json.JSONDecodeError as exc:
        raise ProblemFileError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from exc
    except ValueError as exc:
        raise ProblemFileError(str(exc)) from exc


def _canonical(obj):
    if isinstance(obj, dict):
        return {k: _canonical(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_canonical(v) for v in obj]
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return float(obj)
    return obj


def digest(document: dict) -> str:
    """SHA-256 of the canonical form: sorted keys, no whitespace, numbers as floats."""
    text = json.dumps(_canonical(document), sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False, allow_nan=False)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _path(err) -> str:
    return ".".join(str(p) for p in err.absolute_path) or "(document)"


def validate_document(doc) -> None:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    if errors:
        err = errors[0]
        where = _path(err)
        hint = _HINTS.get(str(err.absolute_path[-1]) if err.absolute_path else "")
        msg = err.message if hint is None else f"{err.message} ({hint})"
        raise ProblemFileError(msg, where)


def _expr(src: str, n: int, where: str):
    try:
        return parse_lagrangian(src, n)
    except ParseError as exc:
        caret = f"\n    {src}\n    {' ' * exc.offset}^"
        raise ProblemFileError(f"{exc}{caret}", where) from exc


def build_grid(doc: dict, orders: Orders, interval: Interval, cells: int | None = None) -> Grid:
    spec = doc.get("grid", {})
    n_cells = cells if cells is not None else spec.get("cells", DEFAULT_CELLS)
    grading = spec.get("grading", "auto")
    exponent = None if grading == "auto" else float(grading)
    try:
        return make_graded_grid(interval, n_cells, orders, exponent)
    except ValueError as exc:
        raise ProblemFileError(str(exc), "grid") from exc


def build_problem(doc: dict) -> Problem:
    validate_document(doc)
    n = int(doc["n"])
    for key in ("x0", "x1"):
        if len(doc[key]) != n:
            raise ProblemFileError(f"expected {n} entries, got {len(doc[key])}", key)
    t0, t1 = doc["interval"]
    if not t0 < t1:
        raise ProblemFileError("need t0 < t1", "interval")
    orders = Orders(doc["alpha"], doc["beta"])
    lag = _expr(doc["lagrangian"], n, "lagrangian")
    cons = tuple(Constraint(_expr(c["lagrangian"], n, f"constraints.{i}.lagrangian"), float(c["value"]))
                 for i, c in enumerate(doc.get("constraints", [])))
    mult = None
    if "multipliers" in doc:
        m = doc["multipliers"]
        if len(m["mu"]) != len(cons):
            raise ProblemFileError("need one multiplier per constraint", "multipliers.mu")
        if m["mu0"] == 0 and all(v == 0 for v in m["mu"]):
            raise ProblemFileError("multipliers must not all vanish", "multipliers")
        mult = Multipliers(m["mu0"], tuple(m["mu"]))
    return Problem(orders, Interval(t0, t1), n, lag, doc["x0"], doc["x1"], cons, mult)


def _psi_functions(spec, n: int):
    srcs = [spec] if isinstance(spec, str) else list(spec)
    if len(srcs) != n:
        raise ProblemFileError(f"need {n} psi expressions, got {len(srcs)}", "trajectory.psi")
    exprs = []
    for i, s in enumerate(srcs):
        e = _expr(s[len("expr:"):], n, f"trajectory.psi.{i}")
        if e.depends_on_x() or e.depends_on_y():
            raise ProblemFileError("psi expressions may only use t", f"trajectory.psi.{i}")
        exprs.append(e)
    return exprs


def _eval_psi(exprs, t, n):
    t = np.atleast_1d(np.asarray(t, float))
    zero = np.zeros((t.size, n))
    try:
        return np.stack([evaluate(e, t, zero, zero) for e in exprs], axis=1)
    except LagrangianDomainError as exc:
        raise ProblemFileError(str(exc), "trajectory.psi") from exc


def _sample_rows(rows, n, corners, interval: Interval):
    rows = np.asarray(rows, float)
    if rows.ndim != 2 or rows.shape[1] != n + 1:
        raise ProblemFileError(f"sample rows must be [t, psi_1..psi_{n}]", "trajectory.psi")
    t = rows[:, 0]
    if np.any(np.diff(t) < 0):
        raise ProblemFileError("sample times must be non-decreasing", "trajectory.psi")
    if t[0] != interval.t0 or t[-1] != interval.t1:
        raise ProblemFileError("samples must start at t0 and end at t1", "trajectory.psi")
    dup = t[1:][np.diff(t) == 0]
    if sorted(dup.tolist()) != sorted(corners):
        raise ProblemFileError("a repeated sample time must be listed in corners and vice versa",
                               "trajectory.corners")
    cuts = [0] + [int(i) + 1 for i in np.nonzero(np.diff(t) == 0)[0]] + [t.size]
    pieces = [(t[a:b], rows[a:b, 1:]) for a, b in zip(cuts, cuts[1:])]

    def piece_eval(tq, piece):
        tp, vp = piece
        return np.stack([np.interp(tq, tp, vp[:, k]) for k in range(n)], axis=1)

    def right(tq):
        tq = np.atleast_1d(tq)
        out = np.empty((tq.size, n))
        for i, tv in enumerate(tq):
            p = next(k for k, pc in enumerate(pieces) if tv < pc[0][-1] or k == len(pieces) - 1)
            out[i] = piece_eval([tv], pieces[p])[0]
        return out

    def left(tq):
        tq = np.atleast_1d(tq)
        out = np.empty((tq.size, n))
        for i, tv in enumerate(tq):
            p = next(k for k, pc in enumerate(pieces) if tv <= pc[0][-1])
            out[i] = piece_eval([tv], pieces[p])[0]
        return out

    return right, left


def build_trajectory(spec: dict, problem: Problem, grid: Grid):
    """Trajectory on ``grid`` refined so that every declared corner is a node."""
    n = problem.n
    corners = sorted(float(c) for c in spec.get("corners", []))
    lo, hi = problem.interval.t0, problem.interval.t1
    if len(set(corners)) != len(corners):
        raise ProblemFileError("corners must be distinct", "trajectory.corners")
    if any(not lo < c < hi for c in corners):
        raise ProblemFileError("corners must lie strictly inside the interval", "trajectory.corners")
    snap = np.zeros(len(corners))
    idx: tuple[int, ...] = ()
    if corners:
        grid, ix = grid.insert(corners)
        snap = np.abs(grid.nodes[ix] - np.array(corners))
        idx = tuple(int(i) for i in ix)
    psi_spec = spec["psi"]
    if isinstance(psi_spec, str) or isinstance(psi_spec[0], str):
        exprs = _psi_functions(psi_spec, n)
        delta = 1e-12 * problem.interval.length

        def right(tq):
            return _eval_psi(exprs, tq, n)

        def left(tq):
            return _eval_psi(exprs, np.asarray(tq) - delta, n)

        vals = right(grid.nodes)
        if idx:
            vals[list(idx)] = right(grid.nodes[list(idx)] + delta)
    else:
        right, left = _sample_rows(psi_spec, n, corners, problem.interval)
        vals = right(grid.nodes)
    left_vals = left(grid.nodes[list(idx)]) if idx else None
    x0 = np.asarray(spec.get("x0", problem.x0), float)
    if x0.shape != (n,):
        raise ProblemFileError(f"expected {n} entries", "trajectory.x0")
    try:
        psi = PiecewiseSample(grid, vals, idx, left_vals)
    except ValueError as exc:
        raise ProblemFileError(str(exc), "trajectory") from exc
    return FracTrajectory(x0, psi, problem.orders.alpha), grid, snap


def load_problem(path, cells: int | None = None, trajectory_path=None) -> LoadedProblem:
    """Read, validate and build everything a problem file describes."""
    doc = read_document(path)
    problem = build_problem(doc)
    grid = build_grid(doc, problem.orders, problem.interval, cells)
    spec = doc.get("trajectory")
    if trajectory_path is not None:
        spec = read_document(trajectory_path)
        if isinstance(spec, dict) and "trajectory" in spec:
            spec = spec["trajectory"]
        try:
            jsonschema.validate(spec, SCHEMA["properties"]["trajectory"])
        except jsonschema.ValidationError as exc:
            raise ProblemFileError(exc.message, f"trajectory.{_path(exc)}") from exc
        # the digest covers the trajectory actually checked
        doc = dict(doc, trajectory=spec)
    traj, snap = None, np.zeros(0)
    if spec is not None:
        traj, grid, snap = build_trajectory(spec, problem, grid)
    return LoadedProblem(doc, digest(doc), problem, grid, traj, snap)
