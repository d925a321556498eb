"""Smooth elastica reference: RKF45 on ``kappa_ss = -kappa^3 / 2`` and curve comparison."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ComparisonError, ConsistencyError, IntegrationFailureError, InvalidInputError

UNIT_SLACK = 1e-12

# Fehlberg 4(5) coefficients
_C = np.array([0.0, 1 / 4, 3 / 8, 12 / 13, 1.0, 1 / 2])
_A = [
    [],
    [1 / 4],
    [3 / 32, 9 / 32],
    [1932 / 2197, -7200 / 2197, 7296 / 2197],
    [439 / 216, -8.0, 3680 / 513, -845 / 4104],
    [-8 / 27, 2.0, -3544 / 2565, 1859 / 4104, -11 / 40],
]
_B4 = np.array([25 / 216, 0.0, 1408 / 2565, 2197 / 4104, -1 / 5, 0.0])
_ERR = np.array([1 / 360, 0.0, -128 / 4275, -2197 / 75240, 1 / 50, 2 / 55])

# quartic through p(0), p'(0), p(1), p'(1), p(1/2): rows give a, b, c in
# p = y0 + t h f0 + a t^2 + b t^3 + c t^4
_QUARTIC = np.linalg.inv(np.array([[1.0, 1.0, 1.0], [2.0, 3.0, 4.0], [1 / 4, 1 / 8, 1 / 16]]))


@dataclass(frozen=True)
class SmoothState:
    s: float
    kappa: float
    kappa_s: float
    x: float
    u: float
    heading: float = 0.0  # tangent angle, used only when c1 = c2 = 0

    def vector(self):
        return np.array([self.kappa, self.kappa_s, self.x, self.u])

    def first_integral_residual(self, c1, c2):
        return self.kappa ** 4 + 4.0 * self.kappa_s ** 2 - (c1 * c1 + c2 * c2)


def _line_tangent(kappa, kappa_s, heading):
    if kappa != 0.0 or kappa_s != 0.0:
        raise ConsistencyError("c1 = c2 = 0 forces kappa = kappa_s = 0")
    return math.cos(heading), -math.sin(heading)


def tangent(kappa, kappa_s, c1, c2, slack=UNIT_SLACK, heading=0.0):
    """Unit tangent ``(x_s, u_s)`` from the first two conservation columns.

    ``u_s`` is taken from the linear solve; ``x_s`` is ``+-sqrt(1 - u_s^2)``
    with the sign of the linear solve's x component.  When ``c1 = c2 = 0`` the
    curve is a straight line in the direction ``heading``.
    """
    r2 = c1 * c1 + c2 * c2
    if r2 == 0.0:
        return _line_tangent(kappa, kappa_s, heading)
    u_s = (2.0 * c1 * kappa_s - c2 * kappa * kappa) / r2
    x_lin = -(c1 * kappa * kappa + 2.0 * c2 * kappa_s) / r2
    if abs(u_s) > 1.0 + slack:
        raise ConsistencyError(f"|u_s| = {abs(u_s):.15g} exceeds 1; constants do not match the state")
    u_s = max(-1.0, min(1.0, u_s))
    x_s = math.sqrt(1.0 - u_s * u_s)
    if x_lin < 0:
        x_s = -x_s
    return x_s, u_s


def projected_tangent(kappa, kappa_s, c1, c2, heading=0.0):
    """Linear-solve tangent rescaled to unit length.

    Identical to :func:`tangent` on the first-integral surface; off it (as at
    intermediate Runge-Kutta stages) it stays a unit vector instead of failing.
    """
    r2 = c1 * c1 + c2 * c2
    if r2 == 0.0:
        return _line_tangent(kappa, kappa_s, heading)
    u_lin = (2.0 * c1 * kappa_s - c2 * kappa * kappa) / r2
    x_lin = -(c1 * kappa * kappa + 2.0 * c2 * kappa_s) / r2
    norm = math.hypot(x_lin, u_lin)
    if norm == 0.0:
        return 1.0, 0.0
    return x_lin / norm, u_lin / norm


def smooth_rhs(state, c1, c2, slack=UNIT_SLACK, project=False, heading=None):
    """Derivative of ``(kappa, kappa_s, x, u)`` with respect to arc length.

    ``slack`` is how far ``|u_s|`` may exceed 1 before the state is declared
    inconsistent with the constants; values within it are clamped.  With
    ``project=True`` the tangent comes from :func:`projected_tangent`.
    """
    if isinstance(state, SmoothState):
        heading = state.heading if heading is None else heading
        state = state.vector()
    heading = 0.0 if heading is None else heading
    kappa, kappa_s = state[0], state[1]
    if project:
        x_s, u_s = projected_tangent(kappa, kappa_s, c1, c2, heading)
    else:
        x_s, u_s = tangent(kappa, kappa_s, c1, c2, slack, heading)
    return np.array([kappa_s, -0.5 * kappa ** 3, x_s, u_s])


def _rkf_stages(f, y, h):
    k = []
    for i in range(6):
        yi = y + h * sum(a * kj for a, kj in zip(_A[i], k)) if i else y
        k.append(f(yi))
    k = np.array(k)
    return y + h * (_B4 @ k), h * (_ERR @ k), k[0]


@dataclass(frozen=True)
class SmoothTrajectory:
    """Accepted RKF45 steps with a quartic interpolant on each interval."""

    s: np.ndarray
    y: np.ndarray
    f: np.ndarray
    y_mid: np.ndarray
    c: np.ndarray

    @property
    def s_max(self):
        return float(self.s[-1])

    def states(self):
        return [SmoothState(s, *row) for s, row in zip(self.s, self.y)]

    def sample(self, s_query):
        """Interpolated ``(kappa, kappa_s, x, u)`` at arc lengths ``s_query``."""
        sq = np.atleast_1d(np.asarray(s_query, dtype=float))
        if np.any(sq < self.s[0] - 1e-12) or np.any(sq > self.s[-1] + 1e-12):
            raise InvalidInputError("sample point outside the integrated range")
        idx = np.clip(np.searchsorted(self.s, sq, side="right") - 1, 0, len(self.s) - 2)
        out = np.empty((len(sq), self.y.shape[1]))
        for j, (i, s) in enumerate(zip(idx, sq)):
            h = self.s[i + 1] - self.s[i]
            t = (s - self.s[i]) / h
            y0, y1 = self.y[i], self.y[i + 1]
            hf0, hf1 = h * self.f[i], h * self.f[i + 1]
            rhs = np.array([y1 - y0 - hf0, hf1 - hf0, self.y_mid[i] - y0 - 0.5 * hf0])
            a, b, c = _QUARTIC @ rhs
            out[j] = y0 + t * hf0 + t * t * a + t ** 3 * b + t ** 4 * c
        return out

    def first_integral_deviation(self):
        c1, c2 = self.c[:2]
        k, ks = self.y[:, 0], self.y[:, 1]
        return float(np.max(np.abs(k ** 4 + 4.0 * ks ** 2 - (c1 * c1 + c2 * c2))))

    def arc_length_deviation(self):
        return float(np.max(np.abs(self.f[:, 2] ** 2 + self.f[:, 3] ** 2 - 1.0)))

    def third_column_deviation(self):
        c1, c2, c3 = self.c
        k, x, u = self.y[:, 0], self.y[:, 2], self.y[:, 3]
        return float(np.max(np.abs(c1 * u - c2 * x + c3 - 2.0 * k)))

    def conservation_rows(self):
        """``c . [[x_s, -u_s, u], [u_s, x_s, -x], [0, 0, 1]]`` at every node."""
        x_s, u_s = self.f[:, 2], self.f[:, 3]
        x, u = self.y[:, 2], self.y[:, 3]
        c1, c2, c3 = self.c
        return np.column_stack([c1 * x_s + c2 * u_s, -c1 * u_s + c2 * x_s, c1 * u - c2 * x + c3])

    def conservation_deviation(self):
        k, ks = self.y[:, 0], self.y[:, 1]
        expected = np.column_stack([-k * k, -2.0 * ks, 2.0 * k])
        return float(np.max(np.abs(self.conservation_rows() - expected)))


def rkf45_integrate(initial, constants, s_max, h0=0.1, tol=None, h_min=1e-12):
    """Integrate the smooth elastica from ``initial`` up to arc length ``s_max``.

    ``tol=None`` takes uniform steps of ``h0`` (the last one shortened to land on
    ``s_max``); otherwise steps adapt so the embedded error estimate stays below
    ``tol`` in a mixed absolute/relative sense.  The fourth-order solution is
    propagated in both modes.  ``constants`` is ``(c1, c2)`` or ``(c1, c2, c3)``;
    a missing c3 is fixed from the initial data.
    """
    if not h0 > 0:
        raise InvalidInputError("h0 must be positive")
    c = [float(v) for v in constants]
    c1, c2 = c[0], c[1]
    y = initial.vector()
    tangent(initial.kappa, initial.kappa_s, c1, c2, heading=initial.heading)  # rejects inconsistent data
    if len(c) < 3:
        c.append(2.0 * initial.kappa - c1 * initial.u + c2 * initial.x)
    # stage values sit off the first-integral surface by the local error
    f = lambda v: smooth_rhs(v, c1, c2, project=True, heading=initial.heading)
    s = float(initial.s)
    end = s + float(s_max)
    S, Y, F, M = [s], [y], [f(y)], []
    h = float(h0)
    while end - s > 1e-12 * max(1.0, abs(end)):
        h = min(h, end - s)
        y_new, err, _ = _rkf_stages(f, y, h)
        if tol is not None:
            scale = tol + tol * np.maximum(np.abs(y), np.abs(y_new))
            ratio = float(np.max(np.abs(err) / scale))
            if ratio > 1.0:
                h *= max(0.2, 0.9 * ratio ** -0.2)
                if h < h_min * max(1.0, abs(s)):
                    raise IntegrationFailureError(s, h)
                continue
        M.append(_rkf_stages(f, y, 0.5 * h)[0])
        s += h
        y = y_new
        S.append(s)
        Y.append(y)
        F.append(f(y))
        if tol is not None:
            h *= min(5.0, 0.9 * ratio ** -0.2) if ratio > 0 else 5.0
        else:
            h = float(h0)
    if len(S) < 2:
        raise InvalidInputError("s_max must be positive")
    return SmoothTrajectory(np.array(S), np.array(Y), np.array(F), np.array(M), np.array(c))


@dataclass(frozen=True)
class ComparisonReport:
    s: np.ndarray
    discrete: np.ndarray
    smooth: np.ndarray
    distance: np.ndarray
    relative_error: float


def compare_curves(discrete, trajectory, anchor_index=None, s_max=None, arc=None):
    """Match discrete vertices to the smooth curve by arc length.

    Vertex k (from ``anchor_index`` on) sits at the cumulative chord length,
    unless ``arc`` supplies the arc-length values directly.  The relative error
    is ``||discrete - smooth||_2 / ||smooth||_2`` over the matched samples.
    """
    pts = np.asarray(discrete.points)[:, :2]
    start = discrete.start
    k0 = (0 if start <= 0 < discrete.stop else start) if anchor_index is None else anchor_index
    if not start <= k0 < discrete.stop:
        raise ComparisonError("anchor index outside the discrete curve")
    pts = pts[k0 - start:]
    if arc is None:
        arc = np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(pts, axis=0).T))])
    arc = np.asarray(arc, dtype=float) + trajectory.s[0]
    limit = trajectory.s_max if s_max is None else min(trajectory.s_max, trajectory.s[0] + s_max)
    keep = arc <= limit + 1e-12
    if keep.sum() < 2:
        raise ComparisonError("discrete and smooth curves do not overlap in arc length")
    arc, pts = arc[keep], pts[keep]
    smooth = trajectory.sample(np.minimum(arc, trajectory.s_max))[:, 2:4]
    diff = pts - smooth
    dist = np.hypot(diff[:, 0], diff[:, 1])
    denom = float(np.linalg.norm(smooth))
    if denom == 0.0:
        raise ComparisonError("smooth samples have zero norm")
    return ComparisonReport(arc, pts, smooth, dist, float(np.linalg.norm(diff) / denom))


def constants_from_discrete(record, kappa_bar, kappa_bar_next, point=(0.0, 0.0), s=0.0, heading=0.0):
    """Conserved vector of a discrete run plus an on-shell smooth initial state.

    ``kappa_bar`` and ``kappa_bar_next`` are the discrete curvatures at the
    anchor and the next index; the first sets kappa, the second the sign of
    kappa_s, whose size comes from the first integral.
    """
    c = np.asarray(record.c, dtype=float)
    if not record.drift < 1e-6:
        raise ConsistencyError(f"record drift {record.drift:.3e} is too large to seed a smooth run")
    c1, c2 = c[0], c[1]
    k0 = float(kappa_bar)
    gap = c1 * c1 + c2 * c2 - k0 ** 4
    if gap < 0:
        if gap > -1e-12 * max(1.0, k0 ** 4):
            gap = 0.0
        else:
            raise ConsistencyError("c1^2 + c2^2 < kappa^4: no real kappa_s")
    ks = math.copysign(0.5 * math.sqrt(gap), kappa_bar_next - kappa_bar)
    x0, u0 = point
    c3 = 2.0 * k0 - c1 * u0 + c2 * x0
    return np.array([c1, c2, c3]), SmoothState(float(s), k0, ks, float(x0), float(u0), float(heading))


@dataclass(frozen=True)
class RunComparison:
    constants: np.ndarray
    initial: SmoothState
    trajectory: SmoothTrajectory
    report: ComparisonReport


def smooth_reference(run, s_max=None, tol=1e-10, h0=0.1):
    """Smooth elastica seeded from a discrete run's conserved vector at index 0.

    The integration covers the run's chord length from point 0 unless
    ``s_max`` is given.
    """
    if not run.records:
        raise ComparisonError("the discrete run has no conservation records")
    kb = run.kappabar()
    i0 = 0 - run.invariants.start
    c, initial = constants_from_discrete(run.records[0], kb[i0], kb[i0 + 1], run.curve.point(0),
                                         heading=run.thetas[i0])
    if s_max is None:
        pts = run.curve.points[-run.curve.start:]
        s_max = float(np.sum(np.hypot(*np.diff(pts, axis=0).T)))
    return c, initial, rkf45_integrate(initial, c, s_max, h0=h0, tol=tol)


def compare_run(run, s_max=None, tol=1e-10):
    c, initial, traj = smooth_reference(run, s_max, tol)
    return RunComparison(c, initial, traj, compare_curves(run.curve, traj, anchor_index=0, s_max=s_max))


def chord_length(run):
    pts = run.curve.points[-run.curve.start:]
    return float(np.sum(np.hypot(*np.diff(pts, axis=0).T)))


def converge(initial, steps, scales=(1.0, 0.5, 0.25), anchor=(0.0, 0.0, 0.0), tol=1e-12, smooth_tol=1e-10,
             branch="shortest"):
    """Refinement study: runs with all four seeds scaled, steps divided by the scale.

    Every run is compared with its own smooth reference over the arc length
    common to all runs.  Returns ``(scale, run, RunComparison)`` triples.
    """
    from .solvers import elastica_run

    runs = []
    for scale in scales:
        seed = [float(v) * scale for v in initial]
        n_steps = int(round(steps / scale))
        runs.append((scale, elastica_run(seed, anchor, n_steps, tol, branch=branch)))
    common = min(chord_length(r) for _, r in runs)
    return [(scale, run, compare_run(run, s_max=common, tol=smooth_tol)) for scale, run in runs]
