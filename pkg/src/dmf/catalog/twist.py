"""Twist action on pairs ``(u, v)`` with an auxiliary ``zeta`` column.

At a point with index p and ``s = (-1)^p`` the element ``(m, a2, a3)`` acts by
``u -> m^s u + a2 + s a3`` (same for v) and ``zeta -> zeta + s ln|m|``.  The
multiplier ``m`` may be negative, which makes the frame single valued for
either sign of ``u - v``.  The point representation is not faithful, so the
adjoint matrix doubles as the working representation.
"""

import math
from dataclasses import dataclass

import numpy as np

from ..curves import DiscreteCurve
from ..errors import AdmissibilityError, InvalidInputError, ParameterError
from ..frame_engine import LagrangianFn, LinearDifferenceOperator as Op
from ..lie_core import StructureConstants
from .base import Action, parity


def _cosh_sinh(m):
    return 0.5 * (m + 1.0 / m), 0.5 * (m - 1.0 / m)


def frame_from_gap(d, v0, v1, n):
    """Frame parameters from ``d = u_n - v_n``, ``v_n`` and ``v_{n+1}``."""
    s = parity(n)
    return (d ** -s, -0.5 * (v1 * d + v0 / d), 0.5 * s * (v1 * d - v0 / d))


class TwistAction(Action):
    name = "twist"
    group_dim = 3
    components = ("u", "v", "zeta")
    invariant_names = ("kappa", "mu", "nu")
    structure_constants = StructureConstants.from_brackets(3, {(0, 1): {2: -1.0}, (0, 2): {1: -1.0}})

    def prepare(self, curve):
        if isinstance(curve, DiscreteCurve) and curve.dim == 2:
            pts = np.column_stack([curve.points, np.zeros(len(curve))])
            curve = DiscreteCurve(pts, curve.start, self.components)
        elif not isinstance(curve, DiscreteCurve):
            pts = np.asarray(curve, dtype=float)
            if pts.ndim == 2 and pts.shape[1] == 2:
                pts = np.column_stack([pts, np.zeros(len(pts))])
            curve = DiscreteCurve(pts, 0, self.components)
        return super().prepare(curve)

    def identity(self):
        return self.element((1.0, 0.0, 0.0))

    def group_matrix(self, p):
        return self.adjoint(p)

    def compose(self, p, q):
        m, a2, a3 = p
        n_, b2, b3 = q
        ch, sh = _cosh_sinh(m)
        return (m * n_, a2 + b2 * ch + b3 * sh, a3 + b2 * sh + b3 * ch)

    def inverse(self, p):
        m, a2, a3 = p
        ch, sh = _cosh_sinh(m)
        # solve a + Ad-block(m) b = 0 with the block inverted by m -> 1/m
        return (1.0 / m, -(a2 * ch - a3 * sh), -(-a2 * sh + a3 * ch))

    def adjoint(self, p):
        m, a2, a3 = p
        ch, sh = _cosh_sinh(m)
        return np.array([[1.0, 0.0, 0.0], [-a3, ch, sh], [-a2, sh, ch]])

    def factors(self, p):
        m, a2, a3 = p
        if not m > 0:
            raise InvalidInputError("canonical coordinates need a positive multiplier")
        return [(2, a3), (1, a2), (0, math.log(m))]

    def act_point(self, p, point, n):
        m, a2, a3 = p
        s = parity(n)
        shift = a2 + s * a3
        scale = m ** s
        return np.array([scale * point[0] + shift, scale * point[1] + shift, point[2] + s * math.log(abs(m))])

    def frame_params(self, curve, n):
        s = parity(n)
        u0, v0, _ = curve.point(n)
        v1 = curve.point(n + 1)[1]
        d = u0 - v0
        if d == 0.0:
            raise AdmissibilityError(n, "u_n = v_n")
        return frame_from_gap(d, v0, v1, n)

    def invariants_at(self, curve, n):
        curve = self.prepare(curve)
        (u0, v0, z0), (u1, v1, _), (_, v2, _) = curve.window(n, 0, 2).points
        d0, d1 = u0 - v0, u1 - v1
        if d0 == 0.0:
            raise AdmissibilityError(n, "u_n = v_n")
        if d1 == 0.0:
            raise AdmissibilityError(n + 1, "u_n = v_n")
        return np.array([d0 * d1, (v2 - v0) / d0, z0 - math.log(abs(d0))])

    def k0_matrix(self, row, n):
        kappa, mu, _ = row
        s = parity(n)
        ch, sh = 0.5 * (kappa + 1.0 / kappa), 0.5 * (kappa - 1.0 / kappa)
        return np.array([
            [1.0, 0.0, 0.0],
            [0.5 * s * kappa * mu, ch, s * sh],
            [0.5 * kappa * mu, s * sh, ch],
        ])

    def phi(self, point, n):
        u, v, _ = point
        s = parity(n)
        return np.array([[s * u, 1.0, s], [s * v, 1.0, s], [s, 0.0, 0.0]])

    def phi_invariant(self, n):
        s = parity(n)
        return np.array([[s, 1.0, s], [0.0, 1.0, s], [s, 0.0, 0.0]])

    def syzygy_operator(self, inv):
        kap, mu = inv["kappa"], inv["mu"]
        h11 = Op({0: kap, 1: kap})
        h12 = -h11
        h21 = Op({0: lambda n: -mu(n)})
        h22 = Op({2: lambda n: kap(n + 1) / kap(n), 0: lambda n: mu(n) - 1.0})
        return [[h11, h12, None], [h21, h22, None], [Op({0: -1.0}), Op({0: 1.0}), Op({0: 1.0})]]

    def invariant_lagrangian(self):
        """``mu mu_1 + ln|kappa| + nu_1 - nu``."""

        def density(w):
            (kap, mu, nu), (_, mu1, nu1) = w[0], w[1]
            return mu * mu1 + math.log(abs(kap)) + nu1 - nu

        return LagrangianFn(1, density)

    def euler_expressions(self, inv):
        kap, mu = inv["kappa"], inv["mu"]
        return [lambda n: 1.0 / kap(n), lambda n: mu(n - 1) + mu(n + 1), lambda n: 0.0]

    def el_residual(self, inv, n):
        """The u equation and the sum of the u and v equations.

        The sum cancels the kappa terms and leaves a relation for mu alone.
        """
        r_u, r_v, _ = super().el_residual(inv, n)
        return np.array([r_u, r_u + r_v])

    def conservation_vector(self, inv, n):
        kap, mu = inv["kappa"], inv["mu"]
        s = parity(n)
        weight = lambda m: kap(m - 1) / kap(m - 2) * (mu(m - 3) + mu(m - 1))
        shifted = np.array([0.0, 1.0, -s]) @ self.k0_matrix(inv.row(n), n)
        return np.array([s, 0.0, 0.0]) + weight(n) * np.array([0.0, 1.0, s]) + weight(n + 1) * shifted

    def random_element(self, rng):
        sign = 1.0 if rng.uniform() < 0.5 else -1.0
        return self.element((sign * math.exp(rng.uniform(-0.7, 0.7)), rng.normal(), rng.normal()))

    def random_element_positive(self, rng):
        return self.element((math.exp(rng.uniform(-1.0, 1.0)), rng.normal(), rng.normal()))

    def random_curve(self, rng, size=8, start=0):
        v = rng.normal(size=size)
        d = rng.uniform(0.5, 2.0, size) * rng.choice([-1.0, 1.0], size)
        z = rng.normal(size=size)
        return DiscreteCurve(np.column_stack([v + d, v, z]), start, self.components)


def original_lagrangian():
    """``(v_2 - v_0)(v_3 - v_1) / ((u_0 - v_0)(u_1 - v_1)) + 2 ln|u_0 - v_0|``."""

    def density(w):
        (u0, v0, _), (u1, v1, _), (_, v2, _), (_, v3, _) = w[0], w[1], w[2], w[3]
        return (v2 - v0) * (v3 - v1) / ((u0 - v0) * (u1 - v1)) + 2.0 * math.log(abs(u0 - v0))

    return LagrangianFn(3, density)


def modified_lagrangian():
    """The original density plus ``zeta_1 - zeta_0``; invariant under the whole group."""
    base = original_lagrangian()
    return LagrangianFn(3, lambda w: base(w) + w[1][2] - w[0][2])


@dataclass(frozen=True)
class TwistParams:
    k1: float
    k2: float
    k3: float = 0.0
    c1: float = 0.0
    c2: float = 2.0
    c3: float = 0.0

    def __post_init__(self):
        for name in ("k1", "k2", "k3", "c1", "c2", "c3"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ParameterError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if abs(self.k1) == 1.0:
            raise ParameterError("k1 must differ from +1 and -1")
        if self.k2 == 0.0:
            raise ParameterError("k2 must be nonzero")
        if self.c2 ** 2 == self.c3 ** 2:
            raise ParameterError("c2^2 - c3^2 must be nonzero")

    @property
    def c(self):
        return np.array([self.c1, self.c2, self.c3])


@dataclass(frozen=True)
class TwistRecord:
    n: int
    invariants: np.ndarray
    V: np.ndarray
    point: np.ndarray
    gap: float


def closed_form(params, n):
    """Extremal with ``mu mu_1 = 1 + k1 (-1)^n`` and conservation constants ``params.c``."""
    k1, k2, k3, c1, c2, c3 = params.k1, params.k2, params.k3, params.c1, params.c2, params.c3
    s = parity(n)
    alt = 1.0 - k1 * s  # 1 + k1 (-1)^(n+1)
    mu = k2 ** s * (1.0 - k1 ** 2) ** -(n // 2) * alt ** n
    mu1 = k2 ** -s * (1.0 - k1 ** 2) ** -((n + 1) // 2) * (1.0 + k1 * s) ** (n + 1)
    kappa = 16.0 / (c2 ** 2 - c3 ** 2) / (1.0 - k1 ** 2) * alt
    d = 4.0 / (mu * (c2 + c3 * s))
    v = (2.0 * n + c1 * s + k3) / (c2 + c3 * s)
    V = np.array([s, 2.0 / mu + 2.0 / (kappa * mu1), 2.0 * s / mu - 2.0 * s / (kappa * mu1)])
    return TwistRecord(n, np.array([kappa, mu, -math.log(abs(d))]), V, np.array([v + d, v, 0.0]), d)


def explicit_constants(mu, gap, v, n):
    """Conservation constants written through ``w_m = 2 / (mu_m (u_m - v_m))``.

    ``mu``, ``gap`` and ``v`` are callables of the index. Only the products
    ``mu_m (u_m - v_m)`` enter, so nothing grows with n the way the frame does.
    """
    s = parity(n)
    w0, w1 = 2.0 / (mu(n) * gap(n)), 2.0 / (mu(n + 1) * gap(n + 1))
    return np.array([s * (1.0 - (v(n + 1) * w1 - v(n) * w0)), w1 + w0, s * (w0 - w1)])


def constants_from_closed_form(params, n):
    recs = {m: closed_form(params, m) for m in (n, n + 1)}
    return explicit_constants(
        lambda m: recs[m].invariants[1], lambda m: recs[m].gap, lambda m: recs[m].point[1], n)


def gap_lagrangian():
    """The modified density in coordinates ``(u - v, v, zeta)``."""

    def density(w):
        (d0, v0, z0), (d1, v1, z1), (_, v2, _), (_, v3, _) = w[0], w[1], w[2], w[3]
        return (v2 - v0) * (v3 - v1) / (d0 * d1) + 2.0 * math.log(abs(d0)) + z1 - z0

    return LagrangianFn(3, density)


def act_gap(p, point, n):
    m, a2, a3 = p
    s = parity(n)
    scale = m ** s
    return np.array([scale * point[0], scale * point[1] + a2 + s * a3, point[2] + s * math.log(abs(m))])


def gap_curve(params, lo, hi):
    """Closed-form points in ``(u - v, v, zeta)`` coordinates, with zeta = 0."""
    rows = []
    for n in range(lo, hi + 1):
        rec = closed_form(params, n)
        rows.append((rec.gap, rec.point[1], 0.0))
    return DiscreteCurve(rows, lo, ("d", "v", "zeta"))


def divergence_gap(curve, p, n):
    """``|Lbar(g.z) - Lbar(z)|`` at n evaluated on a curve in gap coordinates."""
    L = gap_lagrangian()
    moved = curve.with_points([act_gap(p, curve.point(m), m) for m in curve.indices])
    return abs(L.at(moved, n) - L.at(curve, n))


def closed_form_curve(params, lo, hi):
    pts = [closed_form(params, n).point for n in range(lo, hi + 1)]
    return DiscreteCurve(pts, lo, TwistAction.components)


ACTION = TwistAction()
