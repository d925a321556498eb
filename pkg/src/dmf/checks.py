"""Randomized property suites behind ``dmf check``."""

from dataclasses import dataclass

import numpy as np

from .catalog import ACTIONS, get_action
from .curves import DiscreteCurve, Series
from .frame_engine import (
    LinearDifferenceOperator,
    PolynomialPath,
    replacement_check,
    summation_by_parts_residual,
    syzygy_residual,
)
from .lie_core import mat_inverse, validate_structure

DEFAULT_SEED = 42
SUITES = ("adjoint", "frames", "syzygy", "sbp")


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    value: float
    tol: float
    passed: bool

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag}  {self.suite:<8} {self.name:<44} {self.value:10.3e}  (tol {self.tol:.0e})"


def _result(suite, name, value, tol, passed=None):
    value = float(value)
    return CheckResult(suite, name, value, tol, bool(value <= tol) if passed is None else passed)


def check_adjoint(seed=DEFAULT_SEED, draws=100):
    rng = np.random.default_rng(seed)
    out = []
    for name in ("scaling", "twist", "elastica"):
        act = get_action(name)
        out.append(_result("adjoint", f"{name}: structure constants valid", 0.0 if validate_structure(
            act.structure_constants) else 1.0, 0.0))
        gap = hom = 0.0
        for _ in range(draws):
            g = act.random_element_positive(rng) if name == "twist" else act.random_element(rng)
            h = act.random_element(rng)
            gap = max(gap, np.max(np.abs(g.adjoint_from_structure() - g.adjoint())))
            hom = max(hom, np.max(np.abs(g.compose(h).adjoint() - g.adjoint() @ h.adjoint())))
        out.append(_result("adjoint", f"{name}: exp(a C_r) product vs Ad", gap, 1e-12))
        out.append(_result("adjoint", f"{name}: Ad(gh) = Ad(g) Ad(h)", hom, 1e-10))
    return out


def check_frames(seed=DEFAULT_SEED, draws=100):
    rng = np.random.default_rng(seed)
    out = []
    for name, act in ACTIONS.items():
        equi = inv = repl = prol = phi0 = 0.0
        for _ in range(draws):
            curve = act.random_curve(rng, 6)
            g = act.random_element(rng)
            moved = act.act(g.params, curve)
            n = curve.start + 1
            lhs = act.frame_matrix(moved, n)
            rhs = act.frame_matrix(curve, n) @ mat_inverse(g.matrix())
            equi = max(equi, np.max(np.abs(lhs - rhs)) / max(1.0, np.max(np.abs(rhs))))
            a, b = act.invariants_at(moved, n), act.invariants_at(curve, n)
            inv = max(inv, np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b))))
            repl = max(repl, replacement_check(act, curve, n))
            # the frame at n + 1 seen from a curve that starts at n + 1
            tail = DiscreteCurve(curve.points[n + 1 - curve.start:], n + 1, curve.components)
            prol = max(prol, np.max(np.abs(act.frame_matrix(tail, n + 1) - act.frame_matrix(curve, n + 1))))
            normal = act.normalize(curve, n)
            phi0 = max(phi0, np.max(np.abs(act.phi(normal.point(n), n) - act.phi_invariant(n))))
        out.append(_result("frames", f"{name}: equivariance rho(g.z) = rho(z) g^-1", equi, 1e-10))
        out.append(_result("frames", f"{name}: invariance under g", inv, 1e-10))
        out.append(_result("frames", f"{name}: K0 = rho_1 rho_0^-1 identity", repl, 1e-10))
        out.append(_result("frames", f"{name}: shifted frame", prol, 1e-12))
        out.append(_result("frames", f"{name}: invariantized characteristics", phi0, 1e-12))
    return out


def syzygy_ratios(act, rng, amplitude=1.0, h=1e-3, degree=1, floor=1e-10):
    """One random polynomial path: residuals at ``h`` and ``h / 2`` and their ratios.

    Components whose residual is already at rounding level (the central
    difference is exact for polynomials of degree two) get ratio ``nan``.
    """
    curve = act.random_curve(rng, 8)
    coeffs = [curve.points] + [amplitude * rng.normal(size=curve.points.shape) for _ in range(degree)]
    path = PolynomialPath(np.array(coeffs), curve.start, curve.components)
    n = curve.start + 3 if act.name != "scaling" else curve.start + 2
    r1 = syzygy_residual(act, path, n, 0.0, h)
    r2 = syzygy_residual(act, path, n, 0.0, h / 2)
    exact = (r1 < floor) & (r2 < floor)
    ratio = np.where(exact, np.nan, r1 / np.where(r2 > 0, r2, np.finfo(float).tiny))
    return r1, r2, ratio


def check_syzygy(seed=DEFAULT_SEED, paths=20):
    rng = np.random.default_rng(seed)
    out = []
    for name, act in ACTIONS.items():
        worst_ratio = 0.0
        small = 0.0
        for _ in range(paths):
            _, _, ratio = syzygy_ratios(act, rng)
            finite = ratio[np.isfinite(ratio)]
            if finite.size:
                worst_ratio = max(worst_ratio, float(np.max(np.abs(finite - 4.0))))
            r, _, _ = syzygy_ratios(act, rng, amplitude=1e-2, h=1e-4)
            small = max(small, float(np.max(r)))
        out.append(_result("syzygy", f"{name}: |ratio - 4| under h_t halving", worst_ratio, 0.5))
        out.append(_result("syzygy", f"{name}: residual at h_t = 1e-4, |w| ~ 1e-2", small, 1e-8))
        curve = act.random_curve(rng, 8)
        still = PolynomialPath(np.array([curve.points]), curve.start, curve.components)
        n = curve.start + 2
        out.append(_result("syzygy", f"{name}: zero velocity", np.max(syzygy_residual(act, still, n, 0.0, 1e-3)), 0.0))
    return out


def _random_series(rng, lo, hi):
    return Series(rng.normal(size=hi - lo + 1), lo)


def check_sbp(seed=DEFAULT_SEED, draws=20):
    rng = np.random.default_rng(seed)
    out = []
    basic = {"id": LinearDifferenceOperator.identity(), "S": LinearDifferenceOperator.shift(1)}
    for label, op in basic.items():
        worst = 0.0
        for _ in range(draws):
            F, G = _random_series(rng, -10, 60), _random_series(rng, -10, 60)
            worst = max(worst, summation_by_parts_residual(op, F, G, 0, 49))
        out.append(_result("sbp", f"{label}: summation by parts", worst, 1e-13))
    for name, act in ACTIONS.items():
        worst = invol = 0.0
        for _ in range(draws):
            curve = act.random_curve(rng, 40)
            inv = act.invariants(curve)
            lo, hi = inv.start + 4, inv.stop - 5
            for row in act.syzygy_operator(inv):
                for op in row:
                    if op is None:
                        continue
                    F = _random_series(rng, inv.start, inv.stop - 1)
                    G = _random_series(rng, inv.start, inv.stop - 1)
                    worst = max(worst, summation_by_parts_residual(op, F, G, lo, hi))
                    twice = op.adjoint().adjoint()
                    invol = max(invol, max(abs(twice.apply(G, n) - op.apply(G, n)) for n in range(lo, hi)))
        out.append(_result("sbp", f"{name}: summation by parts, all H blocks", worst, 1e-12))
        out.append(_result("sbp", f"{name}: (H*)* = H", invol, 1e-12))
    return out


RUNNERS = {"adjoint": check_adjoint, "frames": check_frames, "syzygy": check_syzygy, "sbp": check_sbp}


def run_suite(suite, seed=DEFAULT_SEED):
    names = SUITES if suite == "all" else (suite,)
    results = []
    for name in names:
        results.extend(RUNNERS[name](seed))
    return results
