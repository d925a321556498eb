"""Euclidean motions of the plane acting on polygonal curves ``(x, u)``.

Group parameters are ``(theta, a, b)``: rotate by theta, then translate by
``(a, b)``.  Generator order for the adjoint and characteristics is
x-translation, u-translation, rotation.
"""

import math

import numpy as np

from ..curves import DiscreteCurve
from ..errors import AdmissibilityError
from ..frame_engine import LagrangianFn, LinearDifferenceOperator as Op
from ..lie_core import StructureConstants, rotation
from .base import Action


def wrap_angle(a):
    """Map an angle to (-pi, pi]."""
    w = math.remainder(a, 2.0 * math.pi)
    return math.pi if w == -math.pi else w


def step_angle(dx, du):
    return math.atan2(-du, dx)


class ElasticaAction(Action):
    name = "elastica"
    group_dim = 3
    components = ("x", "u")
    invariant_names = ("l", "h_theta")
    structure_constants = StructureConstants.from_brackets(3, {(0, 2): {1: 1.0}, (1, 2): {0: -1.0}})

    def identity(self):
        return self.element((0.0, 0.0, 0.0))

    def group_matrix(self, p):
        theta, a, b = p
        g = np.eye(3)
        g[:2, :2] = rotation(theta)
        g[:2, 2] = (a, b)
        return g

    def compose(self, p, q):
        th, a, b = p
        ph, c, d = q
        t = rotation(th) @ np.array([c, d])
        return (th + ph, a + t[0], b + t[1])

    def inverse(self, p):
        th, a, b = p
        t = -rotation(-th) @ np.array([a, b])
        return (-th, t[0], t[1])

    def adjoint(self, p):
        th, a, b = p
        c, s = math.cos(th), math.sin(th)
        return np.array([[c, -s, b], [s, c, -a], [0.0, 0.0, 1.0]])

    def factors(self, p):
        th, a, b = p
        return [(1, b), (0, a), (2, th)]

    def act_point(self, p, point, n):
        th, a, b = p
        return rotation(th) @ np.asarray(point[:2], dtype=float) + np.array([a, b])

    def _step(self, curve, n):
        dx, du = curve.point(n + 1) - curve.point(n)
        ell = math.hypot(dx, du)
        if ell == 0.0:
            raise AdmissibilityError(n, "consecutive points coincide")
        return ell, step_angle(dx, du)

    def frame_params(self, curve, n):
        _, theta = self._step(curve, n)
        t = -rotation(theta) @ curve.point(n)
        return (theta, t[0], t[1])

    def invariants_at(self, curve, n):
        curve = self.prepare(curve)
        curve.require(n, n + 2)
        ell, th0 = self._step(curve, n)
        _, th1 = self._step(curve, n + 1)
        return np.array([ell, wrap_angle(th1 - th0)])

    def k0_matrix(self, row, n):
        ell, h = row
        r = rotation(h)
        k = np.eye(3)
        k[:2, :2] = r
        k[:2, 2] = -r @ np.array([ell, 0.0])
        return k

    def phi(self, point, n):
        x, u = point[:2]
        return np.array([[1.0, 0.0, -u], [0.0, 1.0, x]])

    def phi_invariant(self, n):
        return np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])

    def syzygy_operator(self, inv):
        ell, h = inv["l"], inv["h_theta"]
        cos_h = lambda n: math.cos(h(n))
        sin_h = lambda n: math.sin(h(n))
        l_x = Op({1: cos_h, 0: -1.0})
        l_u = Op({1: sin_h})
        h_x = Op({2: lambda n: sin_h(n + 1) / ell(n + 1), 1: lambda n: -sin_h(n) / ell(n)})
        h_u = Op({
            2: lambda n: -cos_h(n + 1) / ell(n + 1),
            1: lambda n: 1.0 / ell(n + 1) + cos_h(n) / ell(n),
            0: lambda n: -1.0 / ell(n),
        })
        return [[l_x, l_u], [h_x, h_u]]

    def invariant_lagrangian(self):
        """Discrete bending energy ``sin(h)^2 / l``."""
        return LagrangianFn(0, lambda w: math.sin(w[0][1]) ** 2 / w[0][0])

    def euler_expressions(self, inv):
        ell, h = inv["l"], inv["h_theta"]
        return [energy_dl(ell, h), energy_dh(ell, h)]

    def conservation_vector(self, inv, n):
        ell, h = inv["l"], inv["h_theta"]
        e_l, e_h = energy_dl(ell, h), energy_dh(ell, h)
        a = (e_h(n - 1) - e_h(n)) / ell(n)
        return np.array([e_l(n), -a, -e_h(n - 1)])

    def random_element(self, rng):
        return self.element((rng.uniform(-math.pi, math.pi), rng.normal(), rng.normal()))

    def random_curve(self, rng, size=8, start=0):
        theta = np.cumsum(rng.uniform(-1.0, 1.0, size - 1)) + rng.uniform(-math.pi, math.pi)
        ell = rng.uniform(0.5, 1.5, size - 1)
        steps = np.column_stack([ell * np.cos(theta), -ell * np.sin(theta)])
        pts = np.vstack([rng.normal(size=2), steps]).cumsum(axis=0)
        return DiscreteCurve(pts, start, self.components)


def energy_dl(ell, h):
    """``dL/dl = -sin(h)^2 / l^2`` as a function of n."""
    return lambda n: -math.sin(h(n)) ** 2 / ell(n) ** 2


def energy_dh(ell, h):
    """``dL/dh = sin(2h) / l`` as a function of n."""
    return lambda n: math.sin(2.0 * h(n)) / ell(n)


def discrete_curvature(ell, h):
    """``-sin(h) / l``."""
    return -math.sin(h) / ell


def original_lagrangian():
    """Bending energy written in the points: ``cross(d0, d1)^2 / (|d0|^3 |d1|^2)``."""

    def density(w):
        d0 = w[1] - w[0]
        d1 = w[2] - w[1]
        cross = d0[0] * d1[1] - d0[1] * d1[0]
        return cross ** 2 / (math.hypot(*d0) ** 3 * math.hypot(*d1) ** 2)

    return LagrangianFn(2, density)


ACTION = ElasticaAction()
