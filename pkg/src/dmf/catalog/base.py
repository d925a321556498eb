"""Common scaffolding for the catalogue of group actions."""

from dataclasses import dataclass

import numpy as np

from ..curves import DiscreteCurve, InvariantSeries, Series
from ..errors import InvalidInputError, WindowTooShortError
from ..lie_core import adjoint_from_structure


@dataclass(frozen=True)
class GroupElement:
    """Group parameters of one catalogue action, with its representations."""

    action: object
    params: tuple

    def __post_init__(self):
        p = tuple(float(v) for v in self.params)
        if len(p) != self.action.group_dim or not all(np.isfinite(p)):
            raise InvalidInputError(f"{self.action.name} needs {self.action.group_dim} finite parameters")
        object.__setattr__(self, "params", p)

    def matrix(self):
        return self.action.group_matrix(self.params)

    def adjoint(self):
        return self.action.adjoint(self.params)

    def adjoint_from_structure(self):
        return adjoint_from_structure(self.action.structure_constants, self.action.factors(self.params))

    def compose(self, other):
        """``self * other``: apply ``other`` first."""
        return GroupElement(self.action, self.action.compose(self.params, other.params))

    def inverse(self):
        return GroupElement(self.action, self.action.inverse(self.params))

    def act(self, curve):
        return self.action.act(self.params, curve)


class Action:
    """Base class; subclasses fill in the closed-form data of one action.

    Points, frames and invariants are indexed by the absolute lattice index, so
    parity-dependent actions (twist) see the right sign at every point.
    """

    name = ""
    group_dim = 0
    components = ()
    invariant_names = ()
    structure_constants = None
    # offsets of the points the invariants (frame) at n depend on
    invariant_span = (0, 2)
    frame_span = (0, 1)

    # group structure -------------------------------------------------------
    def element(self, params):
        return GroupElement(self, params)

    def identity(self):
        raise NotImplementedError

    def group_matrix(self, params):
        raise NotImplementedError

    def compose(self, p, q):
        raise NotImplementedError

    def inverse(self, p):
        raise NotImplementedError

    def adjoint(self, p):
        raise NotImplementedError

    def factors(self, p):
        raise NotImplementedError

    def act_point(self, p, point, n):
        raise NotImplementedError

    def act(self, p, curve):
        curve = self.prepare(curve)
        pts = np.array([self.act_point(p, curve.point(n), n) for n in curve.indices])
        return curve.with_points(pts)

    def prepare(self, curve):
        """Hook for filling in optional components; returns a DiscreteCurve."""
        if not isinstance(curve, DiscreteCurve):
            curve = DiscreteCurve(curve, 0, self.components)
        if curve.dim != len(self.components):
            raise InvalidInputError(f"{self.name} curves have components {self.components}")
        return curve

    # frames and invariants -------------------------------------------------
    def frame_params(self, curve, n):
        raise NotImplementedError

    def frame_matrix(self, curve, n):
        return self.group_matrix(self.frame_params(self.prepare(curve), n))

    def ad_of_frame(self, curve, n):
        return self.adjoint(self.frame_params(self.prepare(curve), n))

    def normalize(self, curve, n):
        """The curve moved by the frame at n, so that point n is normalized."""
        curve = self.prepare(curve)
        return self.act(self.frame_params(curve, n), curve)

    def invariants_at(self, curve, n):
        raise NotImplementedError

    def invariants(self, curve):
        curve = self.prepare(curve)
        lo, hi = self.invariant_span
        first, last = curve.start - lo, curve.stop - 1 - hi
        if last < first:
            raise WindowTooShortError((first, first + hi - lo), (curve.start, curve.stop - 1), what="curve")
        rows = [self.invariants_at(curve, n) for n in range(first, last + 1)]
        return InvariantSeries(self.name, self.invariant_names, rows, first)

    def k0_matrix(self, row, n):
        raise NotImplementedError

    # infinitesimal data ----------------------------------------------------
    def phi(self, point, n):
        """Characteristics: row per component, column per generator."""
        raise NotImplementedError

    def phi_invariant(self, n):
        raise NotImplementedError

    def invariantized_velocities(self, curve, velocity):
        """``sigma(n) = rho_n . (du_n/dt)``, one Series per component.

        Every catalogue action is affine in the points, so pushing the tangent
        vector forward is a difference of two affine images.
        """
        curve = self.prepare(curve)
        velocity = self.prepare(velocity)
        lo, hi = self.frame_span
        first, last = curve.start - lo, curve.stop - 1 - hi
        rows = []
        for n in range(first, last + 1):
            p = self.frame_params(curve, n)
            base = np.asarray(curve.point(n))
            rows.append(self.act_point(p, base + velocity.point(n), n) - self.act_point(p, base, n))
        rows = np.array(rows).reshape(-1, curve.dim)
        return [Series(rows[:, a], first) for a in range(curve.dim)]

    def syzygy_operator(self, inv):
        raise NotImplementedError

    # variational data ------------------------------------------------------
    def euler_expressions(self, inv):
        """Invariant Euler expressions ``E_kappa(L)`` as callables of n."""
        raise NotImplementedError

    def invariant_lagrangian(self):
        raise NotImplementedError

    def el_residual(self, inv, n):
        """Per component: ``sum_i H_{i alpha}^* E_i(L)`` at n."""
        E = self.euler_expressions(inv)
        blocks = self.syzygy_operator(inv)
        out = []
        for alpha in range(len(self.components)):
            total = 0.0
            for i, row in enumerate(blocks):
                op = row[alpha]
                if op is not None:
                    total += op.adjoint_apply(E[i], n)
            out.append(total)
        return np.array(out)

    def conservation_vector(self, inv, n):
        raise NotImplementedError

    def conservation_constants(self, inv, curve, n):
        """``c = V(I) Ad(rho_n)``."""
        return self.conservation_vector(inv, n) @ self.ad_of_frame(curve, n)

    # sampling --------------------------------------------------------------
    def random_element(self, rng):
        raise NotImplementedError

    def random_curve(self, rng, size=8, start=0):
        raise NotImplementedError


def parity(n):
    """``(-1)^n`` for an integer n."""
    return -1.0 if n % 2 else 1.0
