"""Generic difference-frame machinery.

Everything here is independent of a particular group action: linear difference
operators with their adjoints and boundary terms, the finite-difference Euler
operator of a black-box Lagrangian, Noether first integrals, Maurer-Cartan
matrices and the finite-difference check of the differential-difference
syzygies.  Action-specific data (frames, invariants, operator blocks) comes
from :mod:`dmf.catalog`.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .curves import DiscreteCurve, Series
from .errors import InvalidInputError
from .lie_core import as_matrix, mat_inverse

FD_REL_STEP = 1e-6


def _as_coefficient(c):
    if callable(c):
        return c
    value = float(c)
    return lambda n: value


class LinearDifferenceOperator:
    """Operator ``H = sum_j c_j(n) S_j`` acting on scalar series.

    ``terms`` maps each distinct offset ``j`` to its coefficient, either a
    number or a function of ``n`` (typically a closure over invariant series).
    """

    def __init__(self, terms):
        items = terms.items() if hasattr(terms, "items") else terms
        coeffs = {}
        for j, c in items:
            j = int(j)
            if j in coeffs:
                raise InvalidInputError(f"duplicate offset {j}")
            coeffs[j] = _as_coefficient(c)
        self._coeffs = dict(sorted(coeffs.items()))

    @classmethod
    def identity(cls):
        return cls({0: 1.0})

    @classmethod
    def shift(cls, j=1, coefficient=1.0):
        return cls({j: coefficient})

    @property
    def offsets(self):
        return tuple(self._coeffs)

    def coefficient(self, j, n):
        c = self._coeffs.get(j)
        return 0.0 if c is None else float(c(n))

    def apply(self, G, n):
        """``(H G)(n) = sum_j c_j(n) G(n + j)``."""
        return sum(float(c(n)) * G(n + j) for j, c in self._coeffs.items())

    def adjoint_apply(self, F, n):
        """``(H* F)(n) = sum_j c_j(n - j) F(n - j)``."""
        return sum(float(c(n - j)) * F(n - j) for j, c in self._coeffs.items())

    def adjoint(self):
        """The adjoint as an operator in its own right."""
        return LinearDifferenceOperator(
            {-j: (lambda n, c=c, j=j: c(n - j)) for j, c in self._coeffs.items()}
        )

    def boundary_term(self, F, G, n):
        """``A_H(F, G)(n)`` with ``F H(G) - H*(F) G = (S - id) A_H``."""
        total = 0.0
        for j, c in self._coeffs.items():
            if j > 0:
                ls, sign = range(0, j), 1.0
            elif j < 0:
                ls, sign = range(j, 0), -1.0
            else:
                continue
            for l in ls:
                m = n + l
                total += sign * G(m) * float(c(m - j)) * F(m - j)
        return total

    def __add__(self, other):
        merged = dict(self._coeffs)
        for j, c in other._coeffs.items():
            if j in merged:
                a = merged[j]
                merged[j] = lambda n, a=a, c=c: a(n) + c(n)
            else:
                merged[j] = c
        return LinearDifferenceOperator(merged)

    def __neg__(self):
        return LinearDifferenceOperator({j: (lambda n, c=c: -c(n)) for j, c in self._coeffs.items()})

    def __repr__(self):
        return f"LinearDifferenceOperator(offsets={self.offsets})"


def adjoint_apply(H, F, n):
    """Apply the adjoint of ``H`` to the series ``F`` at ``n``."""
    return H.adjoint_apply(F, n)


def summation_by_parts_residual(H, F, G, lo, hi, relative=True):
    """Largest violation of ``F H(G) - H*(F) G = (S - id) A_H(F, G)`` on ``[lo, hi]``.

    With ``relative=True`` the residual is divided by the largest magnitude of
    the two products on the left, so the result is scale free.
    """
    worst = 0.0
    scale = 0.0
    for n in range(lo, hi + 1):
        fhg = F(n) * H.apply(G, n)
        hfg = H.adjoint_apply(F, n) * G(n)
        jump = H.boundary_term(F, G, n + 1) - H.boundary_term(F, G, n)
        worst = max(worst, abs(fhg - hfg - jump))
        scale = max(scale, abs(fhg), abs(hfg))
    if not relative:
        return worst
    return 0.0 if worst == 0.0 else worst / max(scale, np.finfo(float).tiny)


@dataclass(frozen=True)
class LagrangianFn:
    """Lagrangian density ``L(n, u_0, ..., u_width)`` evaluated on a Window."""

    width: int
    evaluator: Callable

    def __call__(self, window):
        return float(self.evaluator(window))

    def at(self, curve, n):
        return self(curve.window(n, 0, self.width))


def _component_index(curve, component):
    if isinstance(component, str):
        try:
            return curve.components.index(component)
        except ValueError:
            raise InvalidInputError(f"unknown component {component!r}") from None
    alpha = int(component)
    if not 0 <= alpha < curve.dim:
        raise InvalidInputError(f"component index {alpha} out of range")
    return alpha


def lagrangian_partial(L, window, j, alpha, order=4):
    """Central finite-difference ``dL/du^alpha_j`` on one window.

    The step is ``1e-6 * max(1, |value|)``.  ``order=4`` uses the five-point
    stencil; ``order=2`` the plain symmetric quotient.
    """
    value = float(window[j][alpha])
    h = FD_REL_STEP * max(1.0, abs(value))
    h = (value + h) - value  # representable step
    p = window[j].copy()

    def f(offset):
        p[alpha] = value + offset
        return L(window.replace_point(j, p))

    if order == 2:
        return (f(h) - f(-h)) / (2.0 * h)
    if order == 4:
        return (8.0 * (f(h) - f(-h)) - (f(2.0 * h) - f(-2.0 * h))) / (12.0 * h)
    raise InvalidInputError("finite-difference order must be 2 or 4")


def euler_operator(L, curve, n, component):
    """``E_alpha(L)(n) = sum_j S_{-j}(dL/du^alpha_j)`` by central differences."""
    alpha = _component_index(curve, component)
    curve.require(n - L.width, n + L.width)
    total = 0.0
    for j in range(L.width + 1):
        total += lagrangian_partial(L, curve.window(n - j, 0, L.width), j, alpha)
    return total


def noether_first_integral(L, curve, n, characteristic):
    """First integral ``A(n, phi)`` attached to a characteristic ``phi(m, u_m)``.

    ``A = sum_{j>=1} sum_{l<j} S_l { phi(n, u_0) . S_{-j} dL/du_j }``, which is
    constant in ``n`` on solutions when ``phi`` generates a variational symmetry.
    """
    J = L.width
    curve.require(n - J, n + J - 1)
    total = 0.0
    for j in range(1, J + 1):
        for l in range(j):
            m = n + l
            phi = np.asarray(characteristic(m, curve.point(m)), dtype=float)
            window = curve.window(m - j, 0, J)
            for alpha in range(curve.dim):
                if phi[alpha] != 0.0:
                    total += phi[alpha] * lagrangian_partial(L, window, j, alpha)
    return total


def maurer_cartan(rho_n, rho_next):
    """``K = rho_{n+1} rho_n^{-1}``."""
    return as_matrix(rho_next) @ mat_inverse(rho_n)


def _resolve(action):
    if isinstance(action, str):
        from .catalog import get_action

        return get_action(action)
    return action


def replacement_check(action, curve, n):
    """Max-norm gap between ``rho_{n+1} rho_n^{-1}`` and the symbolic K0 at n."""
    act = _resolve(action)
    numeric = maurer_cartan(act.frame_matrix(curve, n), act.frame_matrix(curve, n + 1))
    symbolic = act.k0_matrix(act.invariants_at(curve, n), n)
    return float(np.max(np.abs(numeric - symbolic)))


@dataclass(frozen=True)
class PolynomialPath:
    """Family of curves ``z(t) = sum_k t^k coeffs[k]`` (degree at most 3)."""

    coeffs: np.ndarray
    start: int = 0
    components: tuple = ()

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.ndim != 3 or not 1 <= c.shape[0] <= 4:
            raise InvalidInputError("path coefficients must have shape (deg + 1, N, q) with deg <= 3")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def linear(cls, curve, direction):
        return cls(np.stack([curve.points, np.asarray(direction, float)]), curve.start, curve.components)

    def curve(self, t):
        pts = sum(t ** k * c for k, c in enumerate(self.coeffs))
        return DiscreteCurve(pts, self.start, self.components)

    def velocity(self, t):
        pts = sum(k * t ** (k - 1) * c for k, c in enumerate(self.coeffs) if k > 0)
        if np.isscalar(pts):
            pts = np.zeros(self.coeffs.shape[1:])
        return DiscreteCurve(pts, self.start, self.components)


def syzygy_residual(action, path, n, t, h_t):
    """Per-invariant gap between a central difference in t and ``(H sigma)(n)``.

    The invariantized velocities sigma are evaluated exactly from the path's
    t-derivative, so the gap is the O(h_t^2) error of the central difference.
    """
    if not h_t > 0:
        raise InvalidInputError("h_t must be positive")
    act = _resolve(action)
    up = np.asarray(act.invariants_at(path.curve(t + h_t), n))
    down = np.asarray(act.invariants_at(path.curve(t - h_t), n))
    fd = (up - down) / (2.0 * h_t)
    return np.abs(fd - syzygy_rhs(act, path.curve(t), path.velocity(t), n))


def syzygy_rhs(action, curve, velocity, n):
    """``(H sigma)(n)`` for the invariantized velocities of ``velocity`` along ``curve``."""
    act = _resolve(action)
    inv = act.invariants(curve)
    sigma = act.invariantized_velocities(curve, velocity)
    blocks = act.syzygy_operator(inv)
    out = np.zeros(len(blocks))
    for i, row in enumerate(blocks):
        out[i] = sum(op.apply(sigma[a], n) for a, op in enumerate(row) if op is not None)
    return out


def series(values, start=0):
    """Shorthand for :class:`dmf.curves.Series`."""
    return Series(values, start)
