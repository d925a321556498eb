import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dmf.catalog import (
    ACTIONS,
    closed_form,
    conservation_vector,
    divergence_check,
    elastica,
    el_residual,
    first_integrals_original,
    get_action,
    invariants_from_curve,
    ad_of_frame,
    scaling,
    twist,
)
from dmf.curves import DiscreteCurve, InvariantSeries
from dmf.errors import AdmissibilityError, InvalidInputError, ParameterError
from dmf.frame_engine import euler_operator
from dmf.solvers import elastica_run

ORIGINAL = {
    "scaling": scaling.original_lagrangian(),
    "twist": twist.original_lagrangian(),
    "elastica": elastica.original_lagrangian(),
}


def test_lookup():
    assert set(ACTIONS) == {"scaling", "twist", "elastica"}
    assert get_action("twist") is ACTIONS["twist"]
    with pytest.raises(InvalidInputError):
        get_action("affine")


# invariants --------------------------------------------------------------

def test_scaling_invariants_example():
    c = DiscreteCurve([[2.0, 1.0], [10.0, 3.0], [-4.0, 4.0]], 0, ("x", "u"))
    inv = invariants_from_curve("scaling", c)
    assert np.allclose(inv.row(0), [1.5, 1.0])


def test_elastica_invariants_example():
    c = DiscreteCurve([[0.0, 0.0], [1.0, 0.0], [2.0, 1.0]], 0, ("x", "u"))
    inv = invariants_from_curve("elastica", c)
    l, h = inv.row(0)
    assert l == pytest.approx(1.0)
    assert h == pytest.approx(-math.pi / 4)
    assert -math.sin(h) / l == pytest.approx(math.sqrt(2) / 2)


def test_twist_invariants_and_default_zeta():
    c = DiscreteCurve([[3.0, 1.0], [1.0, -1.0], [0.0, 4.0]], 0, ("u", "v"))
    kappa, mu, nu = get_action("twist").invariants_at(c, 0)
    assert kappa == pytest.approx(2.0 * 2.0)
    assert mu == pytest.approx((4.0 - 1.0) / 2.0)
    assert nu == pytest.approx(-math.log(2.0))


@pytest.mark.parametrize("name,points,bad", [
    ("scaling", [[0, 0], [1, 0], [2, 1]], 0),
    ("scaling", [[0, 0], [1, 1], [2, 1]], 1),
    ("twist", [[1, 1, 0], [2, 0, 0], [0, 1, 0]], 0),
    ("elastica", [[0, 0], [0, 0], [1, 1]], 0),
])
def test_inadmissible_windows_name_the_index(name, points, bad):
    comps = get_action(name).components[: len(points[0])]
    with pytest.raises(AdmissibilityError) as info:
        invariants_from_curve(name, DiscreteCurve(points, 0, comps))
    assert info.value.n == bad


@pytest.mark.parametrize("name", ["scaling", "twist", "elastica"])
def test_invariance_under_the_group(name):
    act = get_action(name)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1))
    def check(seed):
        r = np.random.default_rng(seed)
        c = act.random_curve(r, 7)
        g = act.random_element(r)
        a = act.invariants(c).values
        b = act.invariants(g.act(c)).values
        assert np.max(np.abs(a - b) / np.maximum(1.0, np.abs(a))) < 1e-10

    check()


@pytest.mark.parametrize("name", ["scaling", "twist", "elastica"])
def test_equivariance_and_homomorphism(name, rng):
    act = get_action(name)
    for _ in range(30):
        c = act.random_curve(rng, 5)
        g, h = act.random_element(rng), act.random_element(rng)
        lhs = act.frame_matrix(g.act(c), 1)
        rhs = act.frame_matrix(c, 1) @ np.linalg.inv(g.matrix())
        assert np.max(np.abs(lhs - rhs)) < 1e-10 * max(1.0, np.max(np.abs(rhs)))
        assert np.max(np.abs(g.compose(h).adjoint() - g.adjoint() @ h.adjoint())) < 1e-10
        assert np.allclose(g.compose(g.inverse()).matrix(), np.eye(3), atol=1e-12)


@pytest.mark.parametrize("name", ["scaling", "twist"])
def test_adjoint_matches_structure_constants(name, rng):
    act = get_action(name)
    for _ in range(100):
        g = act.random_element_positive(rng) if name == "twist" else act.random_element(rng)
        assert np.max(np.abs(g.adjoint_from_structure() - g.adjoint())) < 1e-12


def test_twist_factors_need_positive_m():
    with pytest.raises(InvalidInputError):
        get_action("twist").factors((-1.0, 0.0, 0.0))


@pytest.mark.parametrize("name", ["scaling", "twist", "elastica"])
def test_invariantized_characteristics(name, rng):
    act = get_action(name)
    c = act.random_curve(rng, 5)
    for n in (1, 2):
        normal = act.normalize(c, n)
        assert np.allclose(act.phi(normal.point(n), n), act.phi_invariant(n), atol=1e-12)


def test_printed_invariantized_characteristics():
    assert np.array_equal(get_action("scaling").phi_invariant(0), [[0, 1, 0], [0, 0, 1]])
    assert np.array_equal(get_action("elastica").phi_invariant(0), [[1, 0, 0], [0, 1, 0]])
    even, odd = get_action("twist").phi_invariant(0), get_action("twist").phi_invariant(1)
    assert np.array_equal(even[:2], [[1, 1, 1], [0, 1, 1]])
    assert np.array_equal(odd[:2], [[-1, 1, -1], [0, 1, -1]])


def test_twist_normalization_images(rng):
    act = get_action("twist")
    for _ in range(20):
        c = act.random_curve(rng, 4)
        for n in (0, 1):
            z = act.normalize(c, n)
            assert abs(z.point(n)[0] - 1.0) < 1e-12
            assert abs(z.point(n)[1]) < 1e-12
            assert abs(z.point(n + 1)[1]) < 1e-12


def test_scaling_recurrence_of_normalized_points(rng):
    act = get_action("scaling")
    for _ in range(20):
        c = act.random_curve(rng, 9)
        n = 4
        kappa, _ = act.invariants_at(c, n)
        here, there = act.normalize(c, n), act.normalize(c, n + 1)
        for j in range(-2, 3):
            assert abs(here.point(n + j + 1)[1] - ((kappa - 1) * there.point(n + 1 + j)[1] + 1)) < 1e-10


# Euler-Lagrange ----------------------------------------------------------

def _scaling_series(params, lo, hi):
    rows = [scaling.closed_form(params, n).invariants for n in range(lo, hi + 1)]
    return InvariantSeries("scaling", ("kappa", "eta"), rows, lo)


def test_scaling_el_on_closed_form():
    for params in (scaling.ScalingParams(2.0, 1.0, 0.0), scaling.ScalingParams(0.5, -0.3, 1.2, 2.0, 1.0, 0.4)):
        inv = _scaling_series(params, -4, 30)
        for n in range(0, 26):
            assert np.max(np.abs(el_residual("scaling", inv, n))) < 1e-12


def test_twist_mu_identity():
    params = twist.TwistParams(2.0, 1.0)
    mus = [twist.closed_form(params, n).invariants[1] for n in (-1, 0, 1)]
    assert mus == [-1.0, 1.0, 3.0]
    assert 2 - mus[1] * (mus[0] + mus[2]) == 0.0


def test_elastica_el_collinear():
    inv = InvariantSeries("elastica", ("l", "h_theta"), [[0.3, 0.0]] * 8, 0)
    assert np.all(el_residual("elastica", inv, 3) == 0.0)
    assert np.all(conservation_vector("elastica", inv, 3) == 0.0)


@pytest.mark.parametrize("name", ["scaling", "twist", "elastica"])
def test_transcription_against_fd_euler_operator(name, rng):
    act = get_action(name)
    L = ORIGINAL[name]
    for _ in range(5):
        c = act.random_curve(rng, 12)
        inv = act.invariants(c)
        for n in (4, 5):
            normal = act.prepare(act.normalize(c, n))
            fd = np.array([euler_operator(L, normal, n, a) for a in range(2)])
            if name == "twist":
                fd = np.array([fd[0], fd[0] + fd[1]])
            got = act.el_residual(inv, n)
            assert np.max(np.abs(fd - got)) < 1e-6 * max(1.0, np.max(np.abs(got)))


def test_el_stencil_shortfall():
    inv = InvariantSeries("scaling", ("kappa", "eta"), [[2.0, 0.0]] * 3, 0)
    with pytest.raises(IndexError):
        el_residual("scaling", inv, 0)


# conservation ------------------------------------------------------------

def test_scaling_v2_alternates():
    params = scaling.ScalingParams(2.0, 1.0, 0.0)
    inv = _scaling_series(params, -4, 10)
    v2 = [conservation_vector("scaling", inv, n)[1] for n in range(0, 4)]
    assert np.allclose(v2, [1 / 8, 8, 1 / 8, 8], rtol=1e-13)


@pytest.mark.parametrize("params", [
    twist.TwistParams(2.0, 1.0, 0.0, 0.0, 2.0, 0.0),
    twist.TwistParams(0.3, -1.7, 0.4, 0.8, 1.3, -0.6),
    twist.TwistParams(-3.0, 2.0, 1.0, -1.0, 0.5, 2.0),
])
def test_twist_conservation_reproduces_constants(params):
    lo, hi = -6, 14
    curve = twist.closed_form_curve(params, lo, hi)
    inv = get_action("twist").invariants(curve)
    for n in range(-2, 8):
        rec = closed_form("twist", params, n)
        V = conservation_vector("twist", inv, n)
        assert np.allclose(V, rec.V, atol=1e-10 * max(1.0, np.max(np.abs(rec.V))))
        c = V @ ad_of_frame("twist", curve, n)
        assert np.max(np.abs(c - params.c)) < 1e-10
        assert np.max(np.abs(twist.constants_from_closed_form(params, n) - params.c)) < 1e-12


def test_twist_explicit_constants_at_large_n():
    params = twist.TwistParams(2.0, 1.0)
    for n in range(0, 40):
        assert np.max(np.abs(twist.constants_from_closed_form(params, n) - params.c)) < 1e-12


def test_scaling_conservation_reproduces_constants():
    for params in (scaling.ScalingParams(2.0, 1.0, 0.0), scaling.ScalingParams(-0.5, 0.3, 1.2, -2.0, 1.0, 0.4)):
        curve = scaling.closed_form_curve(params, -4, 30)
        inv = get_action("scaling").invariants(curve)
        for n in range(-2, 26):
            c = conservation_vector("scaling", inv, n) @ ad_of_frame("scaling", curve, n)
            assert np.max(np.abs(c - params.c)) < 1e-9 * max(1.0, np.max(np.abs(params.c)))


def test_elastica_on_shell_conservation():
    run = elastica_run((0.05, 0.02, 0.05, 0.02), steps=200)
    radii = [r.V[0] ** 2 + r.V[1] ** 2 for r in run.records]
    assert np.ptp(radii) < 1e-8
    assert run.drift_max < 1e-8


# frames in the adjoint representation -------------------------------------

def test_scaling_ad_of_frame_example():
    c = DiscreteCurve([[2.0, 1.0], [5.0, 3.0], [0.0, 4.0]], 0, ("x", "u"))
    A = ad_of_frame("scaling", c, 0)
    assert A[1, 0] == pytest.approx(0.75)
    assert A[1, 1] == pytest.approx(0.125)
    assert A[2, 0] == pytest.approx(0.5)
    assert A[2, 2] == pytest.approx(0.5)


def test_normalized_frames_are_identity():
    c = DiscreteCurve([[0.0, 0.0], [4.0, 1.0], [1.0, 3.0]], 0, ("x", "u"))
    assert np.allclose(ad_of_frame("scaling", c, 0), np.eye(3))
    e = DiscreteCurve([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]], 0, ("x", "u"))
    assert np.allclose(ad_of_frame("elastica", e, 0), np.eye(3))


# closed forms ------------------------------------------------------------

def test_scaling_closed_form_values():
    p = scaling.ScalingParams(2.0)
    assert closed_form("scaling", p, 0).invariants[0] == 5.0
    assert closed_form("scaling", p, 1).invariants[0] == 1.25
    assert closed_form("scaling", p, 0).point[1] == pytest.approx(0.375)


def test_twist_closed_form_values():
    rec = closed_form("twist", twist.TwistParams(2.0, 1.0, 0.0, 0.0, 2.0, 0.0), 0)
    u, v, _ = rec.point
    assert (u - v, v, u) == (2.0, 0.0, 2.0)


def test_twist_closed_form_mu_products():
    for k1 in (2.0, 0.5, -3.0):
        p = twist.TwistParams(k1, 1.3)
        for n in range(-6, 12):
            mu0 = closed_form("twist", p, n).invariants[1]
            mu1 = closed_form("twist", p, n + 1).invariants[1]
            assert mu0 * mu1 == pytest.approx(1 + k1 * (-1) ** n, rel=1e-14)


@pytest.mark.parametrize("kwargs", [
    dict(k1=0.0), dict(k1=1.0, k4=0.0), dict(k1=1.0, k4=-1.0), dict(k1=math.nan),
])
def test_scaling_params_domain(kwargs):
    with pytest.raises(ParameterError):
        scaling.ScalingParams(**kwargs)


@pytest.mark.parametrize("kwargs", [
    dict(k1=1.0, k2=1.0), dict(k1=-1.0, k2=1.0), dict(k1=2.0, k2=0.0), dict(k1=2.0, k2=1.0, c2=1.0, c3=-1.0),
])
def test_twist_params_domain(kwargs):
    with pytest.raises(ParameterError):
        twist.TwistParams(**kwargs)


def test_closed_form_unknown_family():
    with pytest.raises(InvalidInputError):
        closed_form("elastica", None, 0)


# first integrals in the original variables --------------------------------

def test_scaling_table_integrals_constant_and_invariantized():
    params = scaling.ScalingParams(2.0, 1.0, 1.0, 1.0, 0.0, 0.0)
    curve = scaling.closed_form_curve(params, -6, 56)
    act = get_action("scaling")
    inv = act.invariants(curve)
    L = ORIGINAL["scaling"]
    vals = np.array([first_integrals_original(curve, L, n) for n in range(0, 51)])
    assert np.max(np.ptp(vals, axis=0)) < 1e-6
    assert np.allclose(vals[0], params.c, atol=1e-6)
    for n in range(0, 5):
        normal = act.normalize(curve, n)
        assert np.allclose(first_integrals_original(normal, L, n), act.conservation_vector(inv, n), atol=1e-6)


def test_twist_integrals_of_modified_lagrangian():
    params = twist.TwistParams(0.3, -1.7, 0.4, 0.8, 1.3, -0.6)
    curve = twist.closed_form_curve(params, -6, 14)
    L = twist.modified_lagrangian()
    for n in range(0, 6):
        assert np.allclose(first_integrals_original(curve, L, n, "twist"), params.c, atol=1e-6)


def test_elastica_integrals_match_run_records():
    run = elastica_run((0.05, 0.02, 0.05, 0.02), steps=40)
    L = ORIGINAL["elastica"]
    for n in (3, 10, 30):
        got = first_integrals_original(run.curve, L, n, "elastica")
        assert np.allclose(got, run.records[n].c, atol=1e-6)


# divergence symmetry ------------------------------------------------------

def test_divergence_check(rng):
    act = get_action("twist")
    params = twist.TwistParams(0.3, -1.7, 0.4, 0.8, 1.3, -0.6)
    curve = twist.closed_form_curve(params, 0, 8)
    assert divergence_check(curve, act.identity(), 2) == 0.0
    assert divergence_check(curve, (1.0, 0.7, -0.2), 2) < 1e-14
    L = twist.original_lagrangian()
    for _ in range(20):
        a1 = rng.uniform(-1.5, 1.5)
        g = (math.exp(a1), rng.normal(), rng.normal())
        for n in range(0, 4):
            assert divergence_check(curve, g, n) < 1e-12
            moved = act.act(g, curve)
            assert abs(abs(L.at(moved, n) - L.at(curve, n)) - abs(2 * a1)) < 1e-12


def test_divergence_in_gap_coordinates_matches_points():
    params = twist.TwistParams(2.0, 1.0)
    pts, gaps = twist.closed_form_curve(params, 0, 10), twist.gap_curve(params, 0, 10)
    g = (math.exp(0.4), 0.3, -0.1)
    for n in range(0, 6):
        assert abs(twist.divergence_gap(gaps, g, n) - divergence_check(pts, g, n)) < 1e-13
