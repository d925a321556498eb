"""Scaling action ``(x, u) -> (lambda^3 x + a, lambda u + b)`` on the half-space u_1 > u_0."""

import math
from dataclasses import dataclass

import numpy as np

from ..curves import DiscreteCurve
from ..errors import AdmissibilityError, ParameterError
from ..frame_engine import LagrangianFn, LinearDifferenceOperator as Op
from ..lie_core import StructureConstants
from .base import Action, parity


class ScalingAction(Action):
    """Group parameters ``(lam, a, b)`` with ``lam > 0``.

    Generators, in order: scaling ``3x d/dx + u d/du``, x-translation,
    u-translation.
    """

    name = "scaling"
    group_dim = 3
    components = ("x", "u")
    invariant_names = ("kappa", "eta")
    structure_constants = StructureConstants.from_brackets(3, {(0, 1): {1: -3.0}, (0, 2): {2: -1.0}})

    def identity(self):
        return self.element((1.0, 0.0, 0.0))

    def group_matrix(self, p):
        lam, a, b = p
        return np.array([[lam ** 3, 0.0, a], [0.0, lam, b], [0.0, 0.0, 1.0]])

    def compose(self, p, q):
        lam, a, b = p
        mu, c, d = q
        return (lam * mu, lam ** 3 * c + a, lam * d + b)

    def inverse(self, p):
        lam, a, b = p
        return (1.0 / lam, -a / lam ** 3, -b / lam)

    def adjoint(self, p):
        lam, a, b = p
        return np.array([[1.0, 0.0, 0.0], [-3.0 * a, lam ** 3, 0.0], [-b, 0.0, lam]])

    def factors(self, p):
        lam, a, b = p
        return [(2, b), (1, a), (0, math.log(lam))]

    def act_point(self, p, point, n):
        lam, a, b = p
        return np.array([lam ** 3 * point[0] + a, lam * point[1] + b])

    def frame_params(self, curve, n):
        x0, u0 = curve.point(n)
        d = curve.point(n + 1)[1] - u0
        if not d > 0:
            raise AdmissibilityError(n, f"u_(n+1) - u_n = {d:.6g} is not positive")
        return (1.0 / d, -x0 / d ** 3, -u0 / d)

    def invariants_at(self, curve, n):
        curve = self.prepare(curve)
        (x0, u0), (x1, u1), (_, u2) = curve.window(n, 0, 2).points
        d = u1 - u0
        if not d > 0:
            raise AdmissibilityError(n, f"u_(n+1) - u_n = {d:.6g} is not positive")
        if not u2 > u1:
            raise AdmissibilityError(n + 1, f"u_(n+2) - u_(n+1) = {u2 - u1:.6g} is not positive")
        return np.array([(u2 - u0) / d, (x1 - x0) / d ** 3])

    def k0_matrix(self, row, n):
        kappa, eta = row
        k3 = (kappa - 1.0) ** -3
        k1 = 1.0 / (kappa - 1.0)
        return np.array([[k3, 0.0, -eta * k3], [0.0, k1, -k1], [0.0, 0.0, 1.0]])

    def phi(self, point, n):
        x, u = point
        return np.array([[3.0 * x, 1.0, 0.0], [u, 0.0, 1.0]])

    def phi_invariant(self, n):
        return np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])

    def syzygy_operator(self, inv):
        kap, eta = inv["kappa"], inv["eta"]
        km = lambda n: kap(n) - 1.0
        h_eta_x = Op({1: lambda n: km(n) ** 3, 0: -1.0})
        h_eta_u = Op({0: lambda n: 3.0 * eta(n), 1: lambda n: -3.0 * eta(n) * km(n)})
        h_kap_u = Op({
            0: km,
            1: lambda n: -km(n) * kap(n),
            2: lambda n: km(n) * km(n + 1),
        })
        return [[None, h_kap_u], [h_eta_x, h_eta_u]]

    def invariant_lagrangian(self):
        return LagrangianFn(0, lambda w: w[0][1] * (w[0][0] - 1.0) ** -1.5)

    def euler_expressions(self, inv):
        kap, eta = inv["kappa"], inv["eta"]
        e_kap = lambda n: -1.5 * eta(n) * (kap(n) - 1.0) ** -2.5
        e_eta = lambda n: (kap(n) - 1.0) ** -1.5
        return [e_kap, e_eta]

    def conservation_vector(self, inv, n):
        kap, eta = inv["kappa"], inv["eta"]
        e_kap, e_eta = self.euler_expressions(inv)
        km = lambda m: kap(m) - 1.0
        m = n - 1
        v1 = km(m) * e_kap(m)
        v2 = km(m) ** 3 * e_eta(m)
        v3 = -(3.0 * eta(m) * km(m) * e_eta(m) + km(m) ** 2 * e_kap(m)) + km(n - 2) * km(n - 1) * e_kap(n - 2)
        return np.array([v1, v2, v3])

    def random_element(self, rng):
        return self.element((math.exp(rng.uniform(-0.7, 0.7)), rng.normal(), rng.normal()))

    def random_curve(self, rng, size=8, start=0):
        u = np.concatenate([[rng.normal()], rng.uniform(0.5, 2.0, size - 1)]).cumsum()
        x = rng.normal(size=size)
        return DiscreteCurve(np.column_stack([x, u]), start, self.components)


def original_lagrangian():
    """``(x_1 - x_0) / ((u_1 - u_0)(u_2 - u_1))^(3/2)``, the invariant density in point form."""

    def density(w):
        (x0, u0), (x1, u1), (_, u2) = w[0], w[1], w[2]
        return (x1 - x0) / ((u1 - u0) * (u2 - u1)) ** 1.5

    return LagrangianFn(2, density)


@dataclass(frozen=True)
class ScalingParams:
    """Constants of the closed-form extremals; ``c1, c2, c3`` follow from them."""

    k1: float
    k2: float = 0.0
    k3: float = 0.0
    k4: float = 1.0
    k5: float = 0.0
    k6: float = 0.0

    def __post_init__(self):
        for name in ("k1", "k2", "k3", "k4", "k5", "k6"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ParameterError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if self.k1 == 0.0:
            raise ParameterError("k1 must be nonzero")
        if self.k4 == 0.0:
            raise ParameterError("k4 must be nonzero")
        if self.k1 * self.k4 < 0.0:
            raise ParameterError("k1 and k4 must have the same sign so that u_(n+1) > u_n")

    # The textbook expressions take k1 > 0; for k1 < 0 the conserved vector
    # built from (kappa - 1)^(3/2) flips sign, so every constant does too.
    @property
    def orientation(self):
        return 1.0 if self.k1 > 0 else -1.0

    @property
    def c1(self):
        return self.orientation * 3.0 * (self.k6 - self.k2 * (self.k1 + 1.0 / self.k1 + self.k5) / 4.0)

    @property
    def c2(self):
        return self.orientation * self.k4 ** -3

    @property
    def c3(self):
        return self.orientation * -3.0 * self.k2 / self.k4

    @property
    def c(self):
        return np.array([self.c1, self.c2, self.c3])


@dataclass(frozen=True)
class ClosedFormRecord:
    n: int
    invariants: np.ndarray
    V: np.ndarray
    point: np.ndarray


def closed_form(params, n):
    """Invariants, conservation vector and point ``(x_n, u_n)`` of the extremal family."""
    k1, k2, k3, k4, k5, k6 = params.k1, params.k2, params.k3, params.k4, params.k5, params.k6
    s = parity(n)
    kappa = 1.0 + k1 ** (2.0 * s)
    eta = k1 ** (3.0 * s) * (k2 * ((n + 1) * k1 ** -s - n * k1 ** s) + k3 * s)
    v1 = -0.75 * k2 * (k1 + 1.0 / k1 + (k1 - 1.0 / k1) * (2 * n - 1) * s) + 1.5 * k3 * s
    v2 = k1 ** (-3.0 * s)
    v3 = -3.0 * k2 * k1 ** -s
    u = 0.25 * k4 * (2.0 * (k1 + 1.0 / k1) * n + (k1 - 1.0 / k1) * s + k5)
    x = k4 ** 3 * (k2 * n * k1 ** s - 0.5 * k3 * s + k6)
    V = params.orientation * np.array([v1, v2, v3])
    return ClosedFormRecord(n, np.array([kappa, eta]), V, np.array([x, u]))


def closed_form_curve(params, lo, hi):
    pts = [closed_form(params, n).point for n in range(lo, hi + 1)]
    return DiscreteCurve(pts, lo, ScalingAction.components)


ACTION = ScalingAction()
