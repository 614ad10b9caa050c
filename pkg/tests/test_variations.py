import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gamma

from fracvar.errors import EndpointResidualError, InadmissibleEpsilon
from fracvar.fixtures import analytic_fixture
from fracvar.fracops import FracTrajectory, Interval, Orders, PiecewiseSample, make_graded_grid
from fracvar.lagrange import parse_lagrangian
from fracvar.problem import Problem
from fracvar.variations import (
    admissible_eps,
    bound_M,
    build_dbr_variation,
    build_special_variation,
    descent_probe,
    k_of_eps,
    special_h_closed_form,
    sub_pairing_integral,
)

UNIT = Interval(0.0, 1.0)
F_CASES = {"one": lambda t: np.ones_like(t), "t": lambda t: t, "cos": np.cos}
ORDERS = [(0.5, 0.75), (0.3, 0.9), (0.5, 0.5), (0.75, 0.5), (0.9, 0.3)]


# -- Du Bois-Reymond ----------------------------------------------------------------


@pytest.mark.parametrize("alpha,beta", ORDERS)
@pytest.mark.parametrize("fname", sorted(F_CASES))
def test_dbr_endpoint_vanishes(alpha, beta, fname):
    o = Orders(alpha, beta)
    g = make_graded_grid(UNIT, 256, o)
    var = build_dbr_variation(PiecewiseSample.from_function(g, F_CASES[fname]), o)
    assert var.regime is o.regime()
    assert var.endpoint_residual <= 1e-6
    assert var.h_values[0] == 0.0
    # the plain reconstruction from sampled psi_h agrees up to interpolation error
    assert abs(var.h.x_nodes[-1, 0]) <= 1e-3


def test_dbr_constants_for_unit_f():
    g = make_graded_grid(UNIT, 64, Orders(0.5, 1.0))
    one = PiecewiseSample.constant(g, 1.0)
    # Super: k0 = Gamma(alpha+1) int (1-t)^(beta-1) = Gamma(1.5) for beta = 1
    assert build_dbr_variation(one, Orders(0.5, 1.0)).k0_or_k == pytest.approx(gamma(1.5), rel=1e-12)
    # Sub: k = (2a-b) Gamma(a) int (1-t)^(a-1) = sqrt(pi) for a = b = 1/2
    assert build_dbr_variation(one, Orders(0.5, 0.5)).k0_or_k == pytest.approx(np.sqrt(np.pi), rel=1e-12)


def test_dbr_zero_f_gives_zero_h():
    o = Orders(0.75, 0.5)
    g = make_graded_grid(UNIT, 32, o)
    var = build_dbr_variation(PiecewiseSample.constant(g, 0.0), o)
    assert var.k0_or_k == 0.0
    assert np.all(var.h_values == 0.0) and np.all(var.h.x_nodes == 0.0)


def test_dbr_rejects_vector_f():
    g = make_graded_grid(UNIT, 16, Orders(0.5, 0.5))
    with pytest.raises(ValueError):
        build_dbr_variation(PiecewiseSample.constant(g, [1.0, 2.0]), Orders(0.5, 0.5))


def test_dbr_endpoint_tolerance_is_enforced():
    o = Orders(0.5, 0.75)
    g = make_graded_grid(UNIT, 16, o)
    with pytest.raises(EndpointResidualError):
        build_dbr_variation(PiecewiseSample.from_function(g, np.cos), o, tol=1e-30)


@pytest.mark.parametrize("alpha,beta", [(0.5, 0.5), (0.75, 0.5), (0.9, 0.3)])
def test_sub_pairing_vanishes_for_dbr_variations(alpha, beta):
    o = Orders(alpha, beta)
    g = make_graded_grid(UNIT, 256, o)
    for fn in F_CASES.values():
        var = build_dbr_variation(PiecewiseSample.from_function(g, fn), o)
        assert abs(sub_pairing_integral(var, 1.3, o)) <= 1e-6


# -- special variation ----------------------------------------------------------------


@settings(max_examples=25, deadline=None)
@given(
    st.sampled_from([0.3, 0.5, 0.9]),
    st.floats(0.05, 0.6),
    st.floats(0.2, 3.0),
    st.floats(0.2, 3.0),
    st.lists(st.floats(-2.0, 2.0), min_size=1, max_size=2),
)
def test_special_variation_properties(alpha, tau, a, b, xi):
    eps = admissible_eps(tau, a, b, alpha, 1.0, 0.2 / (a + b))
    if eps <= 0:
        return
    var = build_special_variation(tau, a, b, xi, eps, Orders(alpha, 1.0), UNIT)
    assert var.agreement <= 1e-8
    assert np.max(np.abs(var.h.x_nodes[0])) <= 1e-6
    assert np.max(np.abs(var.h.x_nodes[-1])) <= 1e-6
    assert var.sup_norm <= var.bound_M * eps**alpha * (1 + 1e-12)


def test_special_variation_closed_form_values():
    alpha, tau, a, b, eps = 0.5, 0.2, 1.0, 1.0, 0.05
    k = k_of_eps(tau, a, b, eps, alpha, 1.0)
    h = special_h_closed_form([0.1, 0.2, 1.0], tau, a, b, [1.0], eps, alpha, k)
    assert h[0, 0] == 0.0 and h[1, 0] == 0.0
    assert abs(h[2, 0]) <= 1e-15
    assert bound_M(1.0, 1.0, [1.0], 0.5) == pytest.approx(4.0 / gamma(1.5), rel=1e-14)


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.9])
def test_k_decreases_to_zero(alpha):
    ks = [abs(k_of_eps(0.3, 1.0, 2.0, 0.1 / 2**j, alpha, 1.0)) for j in range(12)]
    assert all(k1 > k2 for k1, k2 in zip(ks, ks[1:]))
    assert ks[-1] < 1e-3 * ks[0] or ks[-1] < 1e-6


def test_k_vanishes_for_integer_order():
    assert k_of_eps(0.3, 1.0, 2.0, 0.05, 1.0, 1.0) == pytest.approx(0.0, abs=1e-15)


def test_inadmissible_epsilon_reports_threshold():
    with pytest.raises(InadmissibleEpsilon) as info:
        build_special_variation(0.0, 10.0, 0.1, [1.0], 0.098, Orders(0.3, 1.0), UNIT)
    thr = info.value.threshold
    assert 0 < thr < 0.098
    build_special_variation(0.0, 10.0, 0.1, [1.0], 0.99 * thr, Orders(0.3, 1.0), UNIT)


def test_special_variation_rejects_bad_support():
    with pytest.raises(ValueError):
        build_special_variation(0.9, 1.0, 1.0, [1.0], 0.1, Orders(0.5, 1.0), UNIT)
    with pytest.raises(ValueError):
        build_special_variation(0.1, -1.0, 1.0, [1.0], 0.1, Orders(0.5, 1.0), UNIT)


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.9])
def test_sub_pairing_vanishes_for_special_variation(alpha):
    var = build_special_variation(0.3, 1.0, 2.0, [0.5], 0.01, Orders(alpha, alpha), UNIT)
    assert abs(sub_pairing_integral(var, 1.3, Orders(alpha, alpha))) <= 1e-6


# -- descent probe ---------------------------------------------------------------------


def test_descent_probe_example1_decreases():
    p, traj = analytic_fixture("example1", 0.5, 1.0)
    top = admissible_eps(0.25, 2.0, 1.0, 0.5, 1.0, 0.25)
    out = descent_probe(p, traj, (0.25, 2.0, 1.0, [1.0]), [top / 2, top / 4, top / 8])
    assert [e for e, _ in out] == [top / 2, top / 4, top / 8]
    assert all(dj < 0 for _, dj in out[-2:])


def test_descent_probe_zero_direction():
    p, traj = analytic_fixture("example1", 0.5, 1.0)
    (_, dj), = descent_probe(p, traj, (0.25, 2.0, 1.0, [0.0]), [0.01])
    assert abs(dj) <= 1e-14


def test_descent_probe_convex_problem_does_not_decrease():
    o = Orders(1.0, 1.0)
    p = Problem(o, UNIT, 1, parse_lagrangian("y^2", 1), [0.0], [1.0])
    g = make_graded_grid(UNIT, 64, o)
    traj = FracTrajectory([0.0], PiecewiseSample.constant(g, 1.0), 1.0)
    for _, dj in descent_probe(p, traj, (0.3, 1.0, 2.0, [0.7]), [0.1, 0.05]):
        assert dj >= -1e-12


def test_descent_probe_validates_xi_dimension():
    p, traj = analytic_fixture("example1", 0.5, 1.0)
    with pytest.raises(ValueError):
        descent_probe(p, traj, (0.25, 2.0, 1.0, [1.0, 0.0]), [0.01])
