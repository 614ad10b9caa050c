"""Command-line front end: ``fracvar validate|check|solve|reproduce``.

Exit codes: 0 satisfied / converged / all reproduced, 1 a necessary condition
is violated (or a reproduction disagrees), 2 invalid input, 3 inconclusive,
4 the solver did not converge or the multiplier could not be bracketed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from . import __version__
from .conditions import (
    ScanMode,
    ScanSpec,
    Verdict,
    abxi_inequality,
    abxi_profile,
    abxi_scan,
    corner_conditions,
    el_residual,
    isoperimetric_el_residual,
    legendre_check,
    weierstrass_scan,
)
from .errors import BracketError, FracvarError, InadmissibleEpsilon, RegimeMismatch
from .fixtures import analytic_fixture, canonical_name, example2_k, example51_constants, example51_x
from .problemfile import ProblemFileError, digest, load_problem
from .solver import SolveOptions, solve_direct, solve_isoperimetric
from .variations import admissible_eps, descent_probe

EXIT_OK, EXIT_VIOLATED, EXIT_INPUT, EXIT_INCONCLUSIVE, EXIT_SOLVER = 0, 1, 2, 3, 4
_VERDICT_EXIT = {Verdict.SATISFIED: EXIT_OK, Verdict.VIOLATED: EXIT_VIOLATED,
                 Verdict.INCONCLUSIVE: EXIT_INCONCLUSIVE}
CLOSED_FORM_TOL = 1e-3
SAMPLED_CONSTRAINT_TOL = 1e-2


def _num(v):
    if v is None:
        return None
    v = float(v)
    return v if math.isfinite(v) else None


def dumps(obj) -> str:
    """Deterministic JSON text for reports."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _emit(text: str, path: str | None):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _write_csv(path: str, header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    _emit(buf.getvalue(), path)


def _fail(msg: str, code: int = EXIT_INPUT) -> int:
    print(f"fracvar: error: {msg}", file=sys.stderr)
    return code


def _floats(text: str, name: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{name} must be a comma-separated list of numbers") from exc
    if not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"{name} must be finite")
    return vals


# --------------------------------------------------------------------------
# validate


def cmd_validate(args) -> int:
    try:
        loaded = load_problem(args.path, args.grid_cells)
    except (ProblemFileError, FracvarError, ValueError) as exc:
        return _fail(str(exc))
    p = loaded.problem
    print(f"valid: n={p.n}, alpha={p.orders.alpha:g}, beta={p.orders.beta:g}, regime={p.orders.regime().value}, "
          f"constraints={len(p.constraints)}, trajectory={'yes' if loaded.trajectory else 'no'}, "
          f"digest={loaded.digest}")
    return EXIT_OK


# --------------------------------------------------------------------------
# check


def _run_check(args, loaded):
    problem, traj = loaded.problem, loaded.trajectory
    which = args.condition
    if which == "el":
        if problem.constraints:
            if problem.multipliers is None:
                raise ProblemFileError("an isoperimetric Euler-Lagrange check needs 'multipliers'", "multipliers")
            return isoperimetric_el_residual(problem, traj, args.tol)
        return el_residual(problem, traj, args.tol)
    if which == "legendre":
        return legendre_check(problem, traj, args.tol)
    if which == "corners":
        return corner_conditions(problem, traj, args.tol)
    mode = ScanMode.strong() if args.mode == "strong" else ScanMode.weak(args.delta)
    spec = ScanSpec(tol=args.tol)
    if which == "weierstrass":
        return weierstrass_scan(problem, traj, mode, spec)
    given = [v is not None for v in (args.a, args.b, args.xi)]
    if any(given) and not all(given):
        raise ProblemFileError("--a, --b and --xi must be given together", "arguments")
    if all(given):
        xi = args.xi if len(args.xi) == problem.n else None
        if xi is None:
            raise ProblemFileError(f"--xi needs {problem.n} component(s)", "arguments")
        return abxi_profile(problem, traj, args.a, args.b, xi, args.tol, args.tau)
    return abxi_scan(problem, traj, mode, spec)


def cmd_check(args) -> int:
    try:
        loaded = load_problem(args.path, args.grid_cells, args.trajectory)
    except (ProblemFileError, FracvarError, ValueError) as exc:
        return _fail(str(exc))
    if loaded.trajectory is None:
        return _fail("no trajectory: add a 'trajectory' object to the file or pass --trajectory")
    if args.mode == "weak" and not args.delta > 0:
        return _fail("--delta must be positive")
    try:
        report = _run_check(args, loaded)
    except ProblemFileError as exc:
        return _fail(str(exc))
    except (FracvarError, ValueError) as exc:
        return _fail(f"check could not be evaluated: {exc}", EXIT_INCONCLUSIVE)
    body = report.to_dict()
    notes = list(body["notes"])
    if loaded.snap.size:
        notes.append(f"{loaded.snap.size} corner(s) inserted as grid nodes (max snap distance "
                     f"{float(loaded.snap.max()):.3g})")
    body.update(tool_version=__version__, problem_digest=loaded.digest, notes=notes)
    _emit(dumps(body), args.out)
    if args.csv:
        n = loaded.problem.n
        header = ["t", "a", "b"] + [f"xi{i + 1}" for i in range(n)] + ["value"]
        rows = []
        for w in report.witnesses:
            xi = list(w.xi) if w.xi is not None else [float("nan")] * n
            rows.append([_blank(w.t), _blank(w.a), _blank(w.b)] + xi + [w.value])
        _write_csv(args.csv, header, rows)
    return _VERDICT_EXIT[report.verdict]


def _blank(v):
    return "" if v is None else float(v)


# --------------------------------------------------------------------------
# solve


def _solve_options(args) -> SolveOptions:
    return SolveOptions(max_iters=args.max_iters, constraint_solver=args.constraint_solver,
                        seed=args.seed, perturbation=args.perturbation)


def _trajectory_rows(traj):
    nodes = traj.grid.nodes
    return [[t, *x, *y] for t, x, y in zip(nodes, traj.x_nodes, traj.psi.values)]


def cmd_solve(args) -> int:
    try:
        loaded = load_problem(args.path, args.grid_cells)
        opts = _solve_options(args)
    except (ProblemFileError, FracvarError, ValueError) as exc:
        return _fail(str(exc))
    problem = loaded.problem
    if len(problem.constraints) > 1:
        return _fail("at most one isoperimetric constraint is supported")
    body = {"tool_version": __version__, "problem_digest": loaded.digest, "command": "solve",
            "regime": problem.orders.regime().value}
    try:
        if problem.constraints:
            result = solve_isoperimetric(problem, loaded.grid, opts)
        else:
            result = solve_direct(problem, loaded.grid, opts)
    except BracketError as exc:
        body["error"] = {"kind": "bracket", "message": str(exc),
                         "bracket": [_num(v) for v in exc.bracket], "values": [_num(v) for v in exc.values]}
        _emit(dumps(body), args.out)
        print(f"fracvar: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except FracvarError as exc:
        body["error"] = {"kind": type(exc).__name__, "message": str(exc)}
        _emit(dumps(body), args.out)
        print(f"fracvar: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    body["result"] = result.to_dict()
    _emit(dumps(body), args.out)
    csv_path = args.csv
    if csv_path is None and args.out not in (None, "-"):
        csv_path = args.out.rsplit(".", 1)[0] + ".csv" if "." in args.out else args.out + ".csv"
    if csv_path is not None:
        n = problem.n
        header = ["t"] + [f"x{i + 1}" for i in range(n)] + [f"psi{i + 1}" for i in range(n)]
        _write_csv(csv_path, header, _trajectory_rows(result.traj))
    return EXIT_OK if result.converged else EXIT_SOLVER


# --------------------------------------------------------------------------
# reproduce


def _entry(name, report=None, expected=None, passed=None, **extra):
    out = {"name": name, "expected": expected, "passed": passed}
    if report is not None:
        out["verdict"] = report.verdict.value
        out["residual_sup"] = _num(report.residual_sup)
        out["worst_witness"] = report.witnesses[0].to_dict() if report.witnesses else None
    out.update(extra)
    return out


def _expect(name, report, expected: Verdict | None, **extra):
    passed = None if expected is None else report.verdict is expected
    return _entry(name, report, None if expected is None else expected.value, passed, **extra)


def _battery_example1(alpha, beta, grid_cells):
    from .fracops import Interval, make_graded_grid, Orders

    grid = make_graded_grid(Interval(0.0, 1.0), grid_cells, Orders(alpha, beta))
    problem, traj = analytic_fixture("example1", alpha, beta, grid)
    out = []
    value = abxi_inequality(problem, traj, 0.25, 2.0, 1.0, [1.0])
    out.append(_entry("abxi(a=2, b=1, xi=1)", expected=-26.0, passed=abs(value + 26.0) <= 1e-9,
                      value=_num(value)))
    out.append(_expect("abxi scan (strong)", abxi_scan(problem, traj, ScanMode.strong()), Verdict.VIOLATED))
    out.append(_expect("abxi scan (weak, delta=1, a/b<1)", abxi_scan(problem, traj, ScanMode.weak(1.0)),
                       Verdict.SATISFIED))
    tau, a, b = 0.25, 2.0, 1.0
    try:
        top = admissible_eps(tau, a, b, alpha, 1.0, 0.99 * (1.0 - tau) / (a + b))
        eps = [top / 2.0, top / 4.0, top / 8.0]
        probe = descent_probe(problem, traj, (tau, a, b, [1.0]), eps)
        small = [dj for _, dj in probe[-2:]]
        out.append(_entry("descent probe on the (2, 1, 1) witness", expected="dJ < 0 at the two smallest eps",
                          passed=all(dj < 0 for dj in small),
                          probe=[{"eps": _num(e), "dJ": _num(dj)} for e, dj in probe]))
    except (InadmissibleEpsilon, FracvarError, ValueError) as exc:
        out.append(_entry("descent probe on the (2, 1, 1) witness", expected="dJ < 0", passed=False,
                          error=str(exc)))
    return out


def _battery_example2(alpha, beta, grid_cells):
    from .fracops import Interval, make_graded_grid, Orders

    grid = make_graded_grid(Interval(0.0, 1.0), grid_cells, Orders(alpha, beta))
    problem, traj = analytic_fixture("example2", alpha, beta, grid)
    equal = alpha == beta
    el = el_residual(problem, traj)
    k = el.fitted_k[0] if el.fitted_k else float("nan")
    out = [_expect("euler-lagrange", el, Verdict.SATISFIED, fitted_k=_num(k),
                   k_closed_form=_num(example2_k(alpha, beta)))]
    out.append(_expect("weierstrass (strong)", weierstrass_scan(problem, traj, ScanMode.strong()),
                       Verdict.VIOLATED))
    # the weak-minimum conclusion is stated for alpha = beta only
    out.append(_expect("weierstrass (weak, delta=1)", weierstrass_scan(problem, traj, ScanMode.weak(1.0)),
                       Verdict.SATISFIED if equal else None))
    out.append(_expect("legendre", legendre_check(problem, traj), Verdict.SATISFIED))
    return out


def _battery_example51(alpha, beta, grid_cells):
    from .fracops import Interval, make_graded_grid, Orders

    grid = make_graded_grid(Interval(0.0, 1.0), grid_cells, Orders(alpha, beta))
    problem, traj = analytic_fixture("example51", alpha, beta, grid)
    # the sampled closed form carries an O(h^2) quadrature error in J1, so its
    # constraint residual is graded loosely and J1 is also checked exactly
    iso = isoperimetric_el_residual(problem, traj, constraint_tol=SAMPLED_CONSTRAINT_TOL)
    out = [_expect("isoperimetric euler-lagrange (closed form)", iso, Verdict.SATISFIED,
                   constraint_residual=_num(iso.extras["constraint_residuals"][0]))]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        j1 = quad(lambda s: example51_x(s, alpha, beta), 0.0, 1.0, weight="alg", wvar=(0.0, beta - 1.0),
                  epsabs=1e-13, epsrel=1e-13, limit=200)[0]
    out.append(_entry("closed form: J1 by adaptive quadrature", expected=0.0, passed=abs(j1) <= 1e-8,
                      value=_num(j1)))
    result = solve_isoperimetric(problem, grid)
    t = grid.nodes
    err = float(np.max(np.abs(result.traj.x_nodes[:, 0] - example51_x(t, alpha, beta))))
    out.append(_entry("solve: sup |x - closed form|", expected=f"<= {CLOSED_FORM_TOL:g}",
                      passed=bool(result.converged and err <= CLOSED_FORM_TOL), value=_num(err),
                      converged=result.converged, iterations=result.iterations))
    mu1 = result.multipliers[1][0] if result.multipliers else float("nan")
    out.append(_entry("solve: multiplier mu1 (informational)", expected=None, passed=None, value=_num(mu1),
                      closed_form=_num(example51_constants(alpha, beta)["mu1"])))
    solved = problem.with_multipliers(0.5, [mu1])
    iso = isoperimetric_el_residual(solved, result.traj)
    out.append(_entry("solve: isoperimetric euler-lagrange residual (informational)", iso, None, None,
                      note="discretization error of the solved trajectory; not a pass/fail item"))
    return out


_BATTERIES = {"example1": _battery_example1, "example2": _battery_example2, "example51": _battery_example51}


def cmd_reproduce(args) -> int:
    try:
        name = canonical_name(args.example)
        from .fracops import Orders

        Orders(args.alpha, args.beta)
        if args.grid_cells < 8 or args.grid_cells % 2:
            raise ValueError("--grid-cells must be an even integer >= 8")
        checks = _BATTERIES[name](args.alpha, args.beta, args.grid_cells)
    except RegimeMismatch as exc:
        return _fail(str(exc))
    except (ValueError, FracvarError) as exc:
        return _fail(str(exc))
    graded = [c["passed"] for c in checks if c["passed"] is not None]
    ok = all(graded)
    ident = {"example": name, "alpha": args.alpha, "beta": args.beta, "cells": args.grid_cells}
    body = {"tool_version": __version__, "problem_digest": digest(ident), "command": "reproduce",
            "example": name, "alpha": args.alpha, "beta": args.beta, "grid_cells": args.grid_cells,
            "checks": checks, "passed": ok}
    _emit(dumps(body), args.out)
    return EXIT_OK if ok else EXIT_VIOLATED


# --------------------------------------------------------------------------
# parser


def _positive(text):
    v = float(text)
    if not (math.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError("must be a positive number")
    return v


def _finite(text):
    v = float(text)
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError("must be finite")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fracvar", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"fracvar {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="schema-check a problem file")
    p.add_argument("path")
    p.add_argument("--grid-cells", type=int)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("check", help="evaluate a necessary condition along a trajectory")
    p.add_argument("condition", choices=["el", "weierstrass", "legendre", "corners", "ab"])
    p.add_argument("path")
    p.add_argument("--trajectory", help="JSON file with a trajectory object")
    p.add_argument("--mode", choices=["strong", "weak"], default="strong")
    p.add_argument("--delta", type=_positive, default=1.0, help="weak-mode neighbourhood size")
    p.add_argument("--a", type=_positive)
    p.add_argument("--b", type=_positive)
    p.add_argument("--xi", type=lambda s: _floats(s, "--xi"), help="comma-separated components")
    p.add_argument("--tau", type=_finite)
    p.add_argument("--tol", type=_positive, default=1e-6)
    p.add_argument("--grid-cells", type=int)
    p.add_argument("--out")
    p.add_argument("--csv", help="write the witness table here")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("solve", help="solve the problem numerically")
    p.add_argument("path")
    p.add_argument("--grid-cells", type=int)
    p.add_argument("--max-iters", type=int, default=SolveOptions.max_iters)
    p.add_argument("--constraint-solver", choices=["newton", "bisection"], default="newton")
    p.add_argument("--seed", type=int)
    p.add_argument("--perturbation", type=float, default=0.0)
    p.add_argument("--out")
    p.add_argument("--csv", help="trajectory table (default: next to --out)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("reproduce", help="run the battery for a worked example")
    p.add_argument("example", choices=["1", "2", "51"])
    p.add_argument("--alpha", type=_positive, required=True)
    p.add_argument("--beta", type=_positive, required=True)
    p.add_argument("--grid-cells", type=int, default=128)
    p.add_argument("--out")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_INPUT
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
