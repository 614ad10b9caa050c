import time

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import gamma

from fracvar.conditions import Verdict, el_residual
from fracvar.errors import BracketError, NonSmoothError
from fracvar.fixtures import analytic_fixture
from fracvar.fracops import Interval, Orders, make_graded_grid, weighted_functional
from fracvar.lagrange import parse_lagrangian
from fracvar.problem import Constraint, Problem
from fracvar.solver import Discretization, SolveOptions, solve_direct, solve_isoperimetric

UNIT = Interval(0.0, 1.0)


def problem(src, alpha=1.0, beta=1.0, x0=0.0, x1=1.0, n=1, constraints=()):
    return Problem(Orders(alpha, beta), UNIT, n, parse_lagrangian(src, n), [x0] * n, [x1] * n,
                   constraints=tuple(constraints))


def grid_for(p, cells):
    return make_graded_grid(p.interval, cells, p.orders)


def x51_oracle(t, alpha, beta):
    """Closed-form extremal by adaptive quadrature of the left integral of psi."""
    a, b = alpha, beta
    P = 4 * a * a * (2 * a - b) * gamma(a) / b**2
    Q = 2 * a * (4 * a * a - b * b) * gamma(a) / b**2

    def psi(s):
        return P * (1 - s) ** (a - b) - Q * (1 - s) ** a

    out = []
    for ti in t:
        if ti == 0:
            out.append(0.0)
            continue
        v = quad(psi, 0, ti, weight="alg", wvar=(0.0, a - 1.0), epsabs=1e-13, epsrel=1e-12, limit=200)[0]
        out.append(v / gamma(a))
    return np.array(out)


# -- basic solves --------------------------------------------------------------------


def test_classical_quadratic():
    p = problem("y^2")
    r = solve_direct(p, grid_for(p, 32))
    assert r.converged
    np.testing.assert_allclose(r.traj.x_nodes[:, 0], r.traj.grid.nodes, atol=1e-12)
    assert r.J == pytest.approx(1.0, abs=1e-12)
    assert r.endpoint_residual <= 1e-12


def test_fractional_quadratic_has_constant_psi():
    p = problem("y^2", 0.5, 0.5)
    r = solve_direct(p, grid_for(p, 64))
    assert r.converged
    np.testing.assert_allclose(r.traj.psi.values[:, 0], gamma(1.5), atol=1e-10)
    rep = el_residual(p, r.traj)
    assert rep.residual_sup <= 1e-8


def test_equal_endpoints_give_zero():
    p = problem("y^2 + x^2", x1=0.0)
    r = solve_direct(p, grid_for(p, 32))
    assert np.max(np.abs(r.traj.psi.values)) <= 1e-12


def test_vector_problem():
    p = problem("y1^2 + y2^2 + x1*x2", n=2)
    r = solve_direct(p, grid_for(p, 32))
    assert r.converged and r.endpoint_residual <= 1e-10
    np.testing.assert_allclose(r.traj.x_nodes[-1], [1.0, 1.0], atol=1e-10)


def test_objective_matches_checker_functional():
    p = problem("y^4 + x^2", 0.75, 0.5)
    r = solve_direct(p, grid_for(p, 64))
    assert r.J == pytest.approx(weighted_functional(p, r.traj), rel=1e-12)


# -- gradient ------------------------------------------------------------------------


@pytest.mark.parametrize("src", ["y^2 + x^2", "y^4 + sin(x)", "exp(y/2) + x*y", "(y^2 - 1)^2 + t*x^2",
                                 "sqrt(1 + y^2) + x^3"])
@pytest.mark.parametrize("orders,cells", [((1.0, 1.0), 16), ((0.5, 0.75), 32), ((0.75, 0.5), 64)])
def test_gradient_matches_finite_differences(src, orders, cells):
    p = problem(src, *orders)
    disc = Discretization(p, grid_for(p, cells))
    rng = np.random.default_rng(cells)
    psi = rng.uniform(-1.0, 1.0, (cells + 1, 1))
    _, g = disc.value_grad(p.lagrangian, psi)
    d = rng.standard_normal(psi.shape)
    h = 1e-6
    fd = (disc.functional(p.lagrangian, psi + h * d) - disc.functional(p.lagrangian, psi - h * d)) / (2 * h)
    assert float(np.sum(g * d)) == pytest.approx(fd, rel=1e-5, abs=1e-9)


def test_hessian_matches_gradient_differences():
    p = problem("y^4 + sin(x) * y", 0.5, 0.75)
    disc = Discretization(p, grid_for(p, 16))
    rng = np.random.default_rng(1)
    psi = rng.uniform(-1, 1, (17, 1))
    _, _, H = disc.value_grad_hess(p.lagrangian, psi)
    d = rng.standard_normal(psi.shape)
    h = 1e-6
    gp = disc.value_grad(p.lagrangian, psi + h * d)[1]
    gm = disc.value_grad(p.lagrangian, psi - h * d)[1]
    np.testing.assert_allclose(H @ d.reshape(-1), ((gp - gm) / (2 * h)).reshape(-1), rtol=1e-5, atol=1e-7)


# -- descent, refinement and certification -------------------------------------------


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_history_is_monotone(seed):
    p = problem("y^4 + x^2", 0.75, 0.5)
    r = solve_direct(p, grid_for(p, 64), SolveOptions(seed=seed, perturbation=0.5))
    h = r.history[0]
    assert r.converged and h.size >= 3
    assert np.all(np.diff(h) <= 1e-12 * abs(h[0]))


def test_seeded_perturbation_is_reproducible():
    p = problem("y^4 + x^2", 0.75, 0.5)
    opts = SolveOptions(seed=5, perturbation=0.3)
    a = solve_direct(p, grid_for(p, 32), opts)
    b = solve_direct(p, grid_for(p, 32), opts)
    np.testing.assert_array_equal(a.traj.psi.values, b.traj.psi.values)


def test_refinement_converges_classical():
    p = problem("y^2 + x^2")
    errs = []
    for cells in (32, 64, 128):
        r = solve_direct(p, grid_for(p, cells))
        t = r.traj.grid.nodes
        errs.append(np.max(np.abs(r.traj.x_nodes[:, 0] - np.sinh(t) / np.sinh(1.0))))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] <= 1e-6


def test_refinement_converges_fractional_isoperimetric():
    p, _ = analytic_fixture("example51", 0.75, 0.5)
    errs = []
    for cells in (32, 64, 128):
        r = solve_isoperimetric(p, grid_for(p, cells))
        t = r.traj.grid.nodes
        errs.append(np.max(np.abs(r.traj.x_nodes[:, 0] - x51_oracle(t, 0.75, 0.5))))
    assert errs[0] > errs[1] > errs[2]


def test_smooth_solution_certifies():
    p = problem("y^2", 0.5, 0.5)
    r = solve_direct(p, grid_for(p, 64))
    assert el_residual(p, r.traj, tol=1e-6).verdict is Verdict.SATISFIED


@pytest.mark.parametrize("orders", [(1.0, 1.0), (0.5, 0.5)])
def test_smooth_solution_residual_is_second_order(orders):
    p = problem("y^2 + x^2", *orders)
    res = [el_residual(p, solve_direct(p, grid_for(p, c)).traj).residual_sup for c in (64, 128, 256)]
    assert res[0] / res[1] > 3.5 and res[1] / res[2] > 3.5
    assert res[2] <= 5e-5


def test_singular_solution_residual_decreases_with_refinement():
    # psi has an endpoint singularity in the Sub regime, so the residual decays like h
    p = problem("y^2 + x^2", 0.75, 0.5)
    res = [el_residual(p, solve_direct(p, grid_for(p, c)).traj).residual_sup for c in (64, 128, 256)]
    assert res[0] / res[1] > 1.8 and res[1] / res[2] > 1.8
    assert res[2] <= 6e-3


# -- isoperimetric --------------------------------------------------------------------


def test_isoperimetric_classical():
    p, _ = analytic_fixture("example51", 1.0, 1.0)
    r = solve_isoperimetric(p, grid_for(p, 128))
    t = r.traj.grid.nodes
    assert r.converged
    assert np.max(np.abs(r.traj.x_nodes[:, 0] - (3 * t * t - 2 * t))) <= 1e-3
    assert r.multipliers[0] == 0.5
    assert abs(r.constraint_residuals[0]) <= 1e-9


def test_isoperimetric_fractional_matches_quadrature_oracle():
    start = time.perf_counter()
    p, _ = analytic_fixture("example51", 0.75, 0.5)
    r = solve_isoperimetric(p, grid_for(p, 128))
    assert r.converged
    t = r.traj.grid.nodes
    assert np.max(np.abs(r.traj.x_nodes[:, 0] - x51_oracle(t, 0.75, 0.5))) <= 1e-3
    assert time.perf_counter() - start < 30.0


def test_bisection_option_agrees():
    p, _ = analytic_fixture("example51", 1.0, 1.0)
    a = solve_isoperimetric(p, grid_for(p, 32))
    b = solve_isoperimetric(p, grid_for(p, 32), SolveOptions(constraint_solver="bisection"))
    assert b.converged
    assert b.multipliers[1][0] == pytest.approx(a.multipliers[1][0], abs=1e-6)


def test_inactive_constraint_has_zero_multiplier():
    # x = t already satisfies int x = 1/2, so the unconstrained minimizer is feasible
    p = problem("y^2", constraints=[Constraint(parse_lagrangian("x", 1), 0.5)])
    r = solve_isoperimetric(p, grid_for(p, 32))
    assert r.converged
    assert abs(r.multipliers[1][0]) <= 1e-9


def test_infeasible_constraint_raises_bracket_error():
    p = problem("y^2", constraints=[Constraint(parse_lagrangian("y^2", 1), -1.0)])
    with pytest.raises(BracketError):
        solve_isoperimetric(p, grid_for(p, 16))


def test_direct_solver_refuses_constrained_problem():
    p, _ = analytic_fixture("example51", 1.0, 1.0)
    with pytest.raises(ValueError):
        solve_direct(p, grid_for(p, 16))


# -- options and failure modes --------------------------------------------------------


@pytest.mark.parametrize("kwargs", [{"grad_tol": 0.0}, {"max_iters": 0}, {"constraint_solver": "brent"},
                                    {"perturbation": -1.0}, {"max_root_iters": 0}])
def test_options_validation(kwargs):
    with pytest.raises(ValueError):
        SolveOptions(**kwargs)


def test_nonsmooth_lagrangian_is_rejected():
    p = problem("abs(y) + y^2", x1=0.0)
    with pytest.raises(NonSmoothError):
        solve_direct(p, grid_for(p, 16))


def test_iteration_budget_reports_not_converged():
    p = problem("y^4 + exp(x)", 0.75, 0.5, x1=3.0)
    r = solve_direct(p, grid_for(p, 32), SolveOptions(max_iters=1))
    assert not r.converged and r.iterations == 1
    assert r.to_dict()["converged"] is False
