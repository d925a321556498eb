import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dmf.catalog import get_action, scaling
from dmf.curves import DiscreteCurve, Series
from dmf.errors import InvalidInputError, SingularMatrixError, WindowTooShortError
from dmf.frame_engine import (
    LagrangianFn,
    LinearDifferenceOperator as Op,
    PolynomialPath,
    adjoint_apply,
    euler_operator,
    lagrangian_partial,
    maurer_cartan,
    noether_first_integral,
    replacement_check,
    summation_by_parts_residual,
    syzygy_residual,
)

SCALING = get_action("scaling")
ELASTICA = get_action("elastica")
TWIST = get_action("twist")


def line_curve(n_pts=8, start=-3):
    idx = np.arange(start, start + n_pts, dtype=float)
    return DiscreteCurve(np.column_stack([np.zeros_like(idx), idx]), start, ("x", "u"))


def test_euler_operator_linear_lagrangian():
    L = LagrangianFn(0, lambda w: w[0][1])
    assert euler_operator(L, line_curve(), 0, "u") == pytest.approx(1.0, abs=1e-9)
    assert euler_operator(L, line_curve(), 0, "x") == 0.0


def test_euler_operator_dirichlet_line():
    L = LagrangianFn(1, lambda w: (w[1][1] - w[0][1]) ** 2)
    assert abs(euler_operator(L, line_curve(), 0, 1)) < 1e-8


def test_euler_operator_against_hand_derivative(rng):
    # L = u_0^2 u_1: E = 2 u_0 u_1 + u_{-1}^2
    L = LagrangianFn(1, lambda w: w[0][0] ** 2 * w[1][0])
    pts = rng.normal(size=(5, 1))
    c = DiscreteCurve(pts, 0, ("u",))
    want = 2 * pts[2, 0] * pts[3, 0] + pts[1, 0] ** 2
    assert euler_operator(L, c, 2, "u") == pytest.approx(want, abs=1e-9)


def test_euler_operator_window_too_short():
    L = LagrangianFn(2, lambda w: 0.0)
    with pytest.raises(WindowTooShortError):
        euler_operator(L, line_curve(4, 0), 1, "u")
    with pytest.raises(InvalidInputError):
        euler_operator(LagrangianFn(0, lambda w: 0.0), line_curve(), 0, "zeta")


def test_partial_orders_agree():
    L = LagrangianFn(1, lambda w: math.sin(w[0][1]) * w[1][1] ** 3)
    win = line_curve().window(0, 0, 1)
    exact = math.sin(0.0) * 3 * 1.0
    assert lagrangian_partial(L, win, 1, 1) == pytest.approx(exact, abs=1e-9)
    assert lagrangian_partial(L, win, 1, 1, order=2) == pytest.approx(exact, abs=1e-6)
    with pytest.raises(InvalidInputError):
        lagrangian_partial(L, win, 1, 1, order=3)


def test_scaling_lagrangian_vanishing_euler_on_extremal():
    params = scaling.ScalingParams(2, 1, 1, 1, 0, 0)
    curve = scaling.closed_form_curve(params, -4, 10)
    L = scaling.original_lagrangian()
    for n in range(-2, 7):
        for comp in ("x", "u"):
            assert abs(euler_operator(L, curve, n, comp)) < 1e-6


def test_adjoint_of_identity_and_shift():
    F = Series(np.arange(10.0) ** 2, 0)
    assert adjoint_apply(Op.identity(), F, 4) == F(4)
    assert adjoint_apply(Op.shift(1), F, 4) == F(3)
    delta = Series([0, 0, 1.0, 0, 0], 0)
    assert [adjoint_apply(Op.shift(1), delta, n) for n in range(1, 5)] == [0, 0, 1.0, 0]


def test_adjoint_window_too_short():
    F = Series([1.0, 2.0], 0)
    with pytest.raises(WindowTooShortError):
        adjoint_apply(Op.shift(1), F, 0)


def test_scaling_first_block_annihilates_euler_expression():
    params = scaling.ScalingParams(2.0)
    rows = [scaling.closed_form(params, n).invariants for n in range(-4, 12)]
    inv = SCALING.invariants(scaling.closed_form_curve(params, -4, 14))
    H = SCALING.syzygy_operator(inv)[1][0]
    e_eta = SCALING.euler_expressions(inv)[1]
    for n in range(0, 8):
        assert abs(H.adjoint_apply(e_eta, n)) < 1e-12
    assert np.allclose(rows[4:8], inv.values[:4], rtol=1e-12)


def test_summation_by_parts_examples(rng):
    F, G = Series(rng.normal(size=60), 0), Series(rng.normal(size=60), 0)
    assert summation_by_parts_residual(Op.identity(), F, G, 2, 50) == 0.0
    assert summation_by_parts_residual(Op.shift(1), F, G, 2, 50) < 1e-13
    inv = SCALING.invariants(SCALING.random_curve(rng, 60))
    kap_u = SCALING.syzygy_operator(inv)[0][1]
    assert len(kap_u.offsets) == 3
    assert summation_by_parts_residual(kap_u, F, G, 3, 50) < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.dictionaries(st.integers(-3, 3), st.floats(-4, 4), min_size=1, max_size=4),
       st.integers(0, 2 ** 32 - 1))
def test_summation_by_parts_and_involution(terms, seed):
    r = np.random.default_rng(seed)
    H = Op(terms)
    F, G = Series(r.normal(size=40), -20), Series(r.normal(size=40), -20)
    assert summation_by_parts_residual(H, F, G, -10, 10) < 1e-12
    HH = H.adjoint().adjoint()
    for n in range(-10, 10):
        assert abs(HH.apply(G, n) - H.apply(G, n)) < 1e-12


def test_operator_algebra():
    F = Series(np.arange(10.0), 0)
    H = Op({0: 2.0}) + Op({0: 1.0, 1: lambda n: n})
    assert H.apply(F, 3) == 3 * 3 + 3 * 4
    assert (-H).apply(F, 3) == -(3 * 3 + 3 * 4)
    with pytest.raises(InvalidInputError):
        Op([(0, 1.0), (0, 2.0)])


def test_maurer_cartan_identity_and_singular():
    rho = np.array([[2.0, 0, 1], [0, 3, 0], [0, 0, 1]])
    assert np.allclose(maurer_cartan(rho, rho), np.eye(3))
    with pytest.raises(SingularMatrixError):
        maurer_cartan(np.zeros((3, 3)), rho)


def test_scaling_frames_example():
    curve = DiscreteCurve([[2.0, 1.0], [10.0, 3.0], [7.0, 4.0]], 0, ("x", "u"))
    assert np.allclose(SCALING.frame_params(curve, 0), (0.5, -0.25, -0.5))
    K = maurer_cartan(SCALING.frame_matrix(curve, 0), SCALING.frame_matrix(curve, 1))
    assert np.allclose(K, [[8, 0, -8], [0, 2, -2], [0, 0, 1]], atol=1e-12)
    assert replacement_check(SCALING, curve, 0) < 1e-12


def test_elastica_frames_example():
    curve = DiscreteCurve([[0.0, 0.0], [1.0, 0.0], [2.0, 1.0], [3.0, 1.0]], 0, ("x", "u"))
    K = maurer_cartan(ELASTICA.frame_matrix(curve, 0), ELASTICA.frame_matrix(curve, 1))
    h = -math.pi / 4
    R = np.array([[math.cos(h), -math.sin(h)], [math.sin(h), math.cos(h)]])
    assert np.allclose(K[:2, :2], R, atol=1e-14)
    assert np.allclose(K[:2, 2], -R @ [1.0, 0.0], atol=1e-14)


@pytest.mark.parametrize("name", ["scaling", "twist", "elastica"])
def test_replacement_on_random_curves(name, rng):
    act = get_action(name)
    for _ in range(20):
        c = act.random_curve(rng, 5)
        assert replacement_check(act, c, 1) < 1e-10


@pytest.mark.parametrize("name", ["scaling", "twist", "elastica"])
def test_syzygy_zero_velocity(name, rng):
    act = get_action(name)
    c = act.random_curve(rng, 8)
    path = PolynomialPath(np.array([c.points]), c.start, c.components)
    assert np.all(syzygy_residual(act, path, 3, 0.0, 1e-3) == 0.0)


@pytest.mark.parametrize("name", ["scaling", "twist", "elastica"])
def test_syzygy_second_order(name, rng):
    act = get_action(name)
    for _ in range(5):
        c = act.random_curve(rng, 8)
        w = 0.01 * rng.normal(size=c.points.shape)
        path = PolynomialPath.linear(c, w)
        assert np.max(syzygy_residual(act, path, 3, 0.0, 1e-4)) < 1e-8
        big = PolynomialPath.linear(c, rng.normal(size=c.points.shape))
        r1 = syzygy_residual(act, big, 3, 0.0, 1e-3)
        r2 = syzygy_residual(act, big, 3, 0.0, 5e-4)
        for a, b in zip(r1, r2):
            if a > 1e-10:  # the twist kappa is quadratic in t: its difference quotient is exact
                assert 3.5 < a / b < 4.5


def test_syzygy_cubic_path(rng):
    c = TWIST.random_curve(rng, 8)
    coeffs = np.stack([c.points] + [0.5 * rng.normal(size=c.points.shape) for _ in range(3)])
    path = PolynomialPath(coeffs, c.start, c.components)
    r1 = syzygy_residual(TWIST, path, 3, 0.1, 1e-3)
    r2 = syzygy_residual(TWIST, path, 3, 0.1, 5e-4)
    assert np.all(np.abs(r1 / r2 - 4.0) < 0.5)


def test_polynomial_path_validation(rng):
    with pytest.raises(InvalidInputError):
        PolynomialPath(np.zeros((5, 3, 2)))
    with pytest.raises(InvalidInputError):
        syzygy_residual(SCALING, PolynomialPath(np.zeros((1, 3, 2))), 0, 0.0, 0.0)


def test_noether_integral_of_translation_is_constant():
    # L = (u1 - u0)^2 / 2 is translation invariant; on u_n = n^... a line is a solution
    L = LagrangianFn(1, lambda w: 0.5 * (w[1][0] - w[0][0]) ** 2)
    c = DiscreteCurve(np.arange(-3, 8, dtype=float)[:, None] * 0.7 + 1.0, -3, ("u",))
    vals = [noether_first_integral(L, c, n, lambda m, p: [1.0]) for n in range(-1, 6)]
    assert np.ptp(vals) < 1e-9
    assert vals[0] == pytest.approx(0.7, abs=1e-9)
