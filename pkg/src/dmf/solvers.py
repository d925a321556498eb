"""Frame-parameter recurrences, curve reconstruction and the discrete elastica stepper."""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .catalog import get_action
from .catalog.elastica import energy_dh, energy_dl, step_angle, wrap_angle
from .curves import DiscreteCurve, InvariantSeries, Series
from .errors import (
    BranchError,
    InconsistentConstantsError,
    InvalidInputError,
    StepFailureError,
)
from .lie_core import rotation

FIRST_INTEGRAL_TOL = 1e-6
DET_FLOOR = 1e-13
MAX_HALVINGS = 8


# ---------------------------------------------------------------------------
# Maurer-Cartan recurrences


@dataclass(frozen=True)
class FrameParamSeries:
    """Group parameters of the frame at ``n = start, start + 1, ...``."""

    action: str
    params: np.ndarray
    start: int = 0

    def __post_init__(self):
        p = np.array(self.params, dtype=float)
        p.setflags(write=False)
        object.__setattr__(self, "params", p)

    def __len__(self):
        return self.params.shape[0]

    @property
    def indices(self):
        return np.arange(self.start, self.start + len(self))

    def at(self, n):
        i = n - self.start
        if not 0 <= i < len(self):
            raise InvalidInputError(f"no frame parameters at n={n}")
        return tuple(self.params[i])


def _scaling_forward(p, row, n):
    lam, a, b = p
    kappa, eta = row
    k = kappa - 1.0
    if not k > 0:
        raise BranchError(n, f"kappa = {kappa!r} is not above 1")
    return (lam / k, (a - eta) / k ** 3, (b - 1.0) / k)


def _scaling_backward(p, row, n):
    lam, a, b = p
    kappa, eta = row
    k = kappa - 1.0
    if not k > 0:
        raise BranchError(n, f"kappa = {kappa!r} is not above 1")
    return (k * lam, k ** 3 * a + eta, k * b + 1.0)


def _elastica_forward(p, row, n):
    theta, a, b = p
    ell, h = row
    t = rotation(h) @ (np.array([a, b]) - np.array([ell, 0.0]))
    return (theta + h, t[0], t[1])


def _elastica_backward(p, row, n):
    theta, a, b = p
    ell, h = row
    t = rotation(-h) @ np.array([a, b]) + np.array([ell, 0.0])
    return (theta - h, t[0], t[1])


_MARCH = {
    "scaling": (_scaling_forward, _scaling_backward),
    "elastica": (_elastica_forward, _elastica_backward),
}


def solve_frame_recurrence(action, invariants, seed, n0, lo=None, hi=None):
    """March ``rho_(n+1) = K0(n) rho_n`` from ``seed`` at ``n0`` over ``[lo, hi]``.

    Forward steps use the invariants at n; backward steps invert the same
    relation.  The scaling branch requires ``kappa > 1`` at every step.
    """
    act = get_action(action)
    if act.name not in _MARCH:
        raise InvalidInputError(f"no parameter recurrence for {act.name}")
    forward, backward = _MARCH[act.name]
    lo = n0 if lo is None else lo
    hi = invariants.stop if hi is None else hi
    if not lo <= n0 <= hi:
        raise InvalidInputError("seed index must lie in [lo, hi]")
    seed = tuple(float(v) for v in seed)
    if act.name == "scaling" and not seed[0] > 0:
        raise BranchError(n0, "seed lambda must be positive")
    out = {n0: seed}
    p = seed
    for n in range(n0, hi):
        p = forward(p, invariants.row(n), n)
        if not np.all(np.isfinite(p)):
            raise BranchError(n + 1, "frame parameters overflowed")
        out[n + 1] = p
    p = seed
    for n in range(n0 - 1, lo - 1, -1):
        p = backward(p, invariants.row(n), n)
        if not np.all(np.isfinite(p)):
            raise BranchError(n, "frame parameters overflowed")
        out[n] = p
    return FrameParamSeries(act.name, [out[n] for n in range(lo, hi + 1)], lo)


def reconstruct_from_params(action, params):
    """Points ``u_n = rho_n^{-1} . 0``, i.e. undo the normalization ``rho_n . u_n = 0``."""
    act = get_action(action)
    if act.name not in _MARCH:
        raise InvalidInputError(f"{act.name} does not normalize points to the origin")
    origin = np.zeros(len(act.components))
    pts = [act.act_point(act.inverse(params.at(n)), origin, n) for n in params.indices]
    return DiscreteCurve(pts, params.start, act.components)


# ---------------------------------------------------------------------------
# reconstruction from conservation laws


@dataclass(frozen=True)
class Reconstruction:
    """Curve recovered from conservation constants, with the first-integral check."""

    curve: DiscreteCurve
    first_integral_deviation: float


def _relative_gap(a, b):
    return abs(a - b) / max(1.0, abs(a), abs(b))


def reconstruct_from_conservation(action, invariants, c, anchor, lo=None, hi=None, route="increments"):
    """Recover the points from ``V(I) Ad(rho_n) = c``.

    Scaling routes: ``"increments"`` marches ``u_(n+1) - u_n = V3 / c3`` and takes
    x from the first column; ``"mixed"`` takes ``lambda = c3 / V3``, marches b by
    its Maurer-Cartan recurrence and solves the first column for a.  ``anchor``
    is ``u`` at ``lo``.

    Elastica: the first two columns fix the frame angle, and the points follow
    from the step rule starting at ``anchor = (x, u)`` at ``lo``.
    """
    act = get_action(action)
    c = np.asarray(c, dtype=float)
    lo = invariants.start + 2 if lo is None else lo
    hi = invariants.stop - 1 if hi is None else hi
    if act.name == "scaling":
        return _scaling_from_conservation(act, invariants, c, anchor, lo, hi, route)
    if act.name == "elastica":
        return _elastica_from_conservation(act, invariants, c, anchor, lo, hi)
    raise InvalidInputError(f"no conservation-law reconstruction for {act.name}")


def _scaling_from_conservation(act, inv, c, anchor, lo, hi, route):
    c1, c2, c3 = c
    if c3 == 0.0:
        raise InconsistentConstantsError("c3 = 0 leaves u undetermined")
    u0 = float(np.ravel(anchor)[-1])
    target = c2 / c3 ** 3
    worst = 0.0
    V = {n: act.conservation_vector(inv, n) for n in range(lo, hi + 1)}
    for v in V.values():
        worst = max(worst, _relative_gap(v[1] / v[2] ** 3, target))
    if worst > FIRST_INTEGRAL_TOL:
        raise InconsistentConstantsError(
            f"V2/V3^3 deviates from c2/c3^3 by {worst:.3e} (relative)")
    pts = []
    if route == "increments":
        u = u0
        for n in range(lo, hi + 1):
            v1, v2, v3 = V[n]
            d = v3 / c3
            if not d > 0:
                raise BranchError(n, "V3 / c3 is not positive")
            pts.append(((c1 - v1 - v3 * u / d) * d ** 3 / (3.0 * v2), u))
            u += d
    elif route == "mixed":
        lam = c3 / V[lo][2]
        b = -lam * u0
        for n in range(lo, hi + 1):
            v1, v2, v3 = V[n]
            lam = c3 / v3
            if not lam > 0:
                raise BranchError(n, "c3 / V3 is not positive")
            a = (v1 - c1 - b * v3) / (3.0 * v2)
            pts.append((-a / lam ** 3, -b / lam))
            b = _scaling_forward((lam, a, b), inv.row(n), n)[2]
    else:
        raise InvalidInputError(f"unknown route {route!r}")
    return Reconstruction(DiscreteCurve(pts, lo, act.components), worst)


def _elastica_from_conservation(act, inv, c, anchor, lo, hi):
    c1, c2, _ = c
    radius2 = c1 * c1 + c2 * c2
    if radius2 == 0.0:
        raise InconsistentConstantsError("c1 = c2 = 0 does not determine the frame angle")
    worst = 0.0
    point = np.asarray(anchor, dtype=float)[:2]
    pts = [point]
    for n in range(lo, hi + 1):
        v1, v2, _ = act.conservation_vector(inv, n)
        worst = max(worst, _relative_gap(v1 * v1 + v2 * v2, radius2))
        theta = math.atan2(v2, v1) - math.atan2(c2, c1)
        point = point + inv["l"](n) * np.array([math.cos(theta), -math.sin(theta)])
        pts.append(point)
    if worst > FIRST_INTEGRAL_TOL:
        raise InconsistentConstantsError(
            f"V1^2 + V2^2 deviates from c1^2 + c2^2 by {worst:.3e} (relative)")
    return Reconstruction(DiscreteCurve(pts, lo, act.components), worst)


# ---------------------------------------------------------------------------
# discrete elastica


def _e_h(ell, h):
    return math.sin(2.0 * h) / ell


def _e_l(ell, h):
    return -math.sin(h) ** 2 / ell ** 2


@dataclass(frozen=True)
class ElasticaState:
    """Invariants at ``n - 1`` and ``n`` plus ``w = (l^-1 (S_-1 - id) E_h, E_l)`` at n."""

    n: int
    l_prev: float
    l_cur: float
    h_prev: float
    h_cur: float
    w: np.ndarray = field(default=None)

    def __post_init__(self):
        vals = [float(v) for v in (self.l_prev, self.l_cur, self.h_prev, self.h_cur)]
        if not all(map(math.isfinite, vals)):
            raise InvalidInputError("elastica state must be finite")
        if not (vals[0] > 0 and vals[1] > 0):
            raise InvalidInputError("step lengths must be positive")
        l_prev, l_cur, h_prev, h_cur = vals
        expected = np.array([(_e_h(l_prev, h_prev) - _e_h(l_cur, h_cur)) / l_cur, _e_l(l_cur, h_cur)])
        w = expected if self.w is None else np.array(self.w, dtype=float)
        if w.shape != (2,) or not np.all(np.isfinite(w)):
            raise InvalidInputError("w must be a finite 2-vector")
        if abs(w[1] - expected[1]) > 1e-12 * max(1.0, abs(expected[1])):
            raise InvalidInputError("second component of w must equal -sin(h)^2 / l^2")
        w.setflags(write=False)
        for name, v in zip(("l_prev", "l_cur", "h_prev", "h_cur"), vals):
            object.__setattr__(self, name, v)
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "w", w)


def _local_residual(e0, target, ell, h):
    """Scaled residual of the two equations fixing ``(l, h)`` at the next index."""
    s2 = math.sin(2.0 * h)
    sq = math.sin(h) ** 2
    t1 = (e0 / ell, s2 / ell ** 2, target[0])
    t2 = (sq / ell ** 2, target[1])
    f = np.array([t1[0] - t1[1] - t1[2], -t2[0] - t2[1]])
    scale = np.array([max(1.0, *map(abs, t1)), max(1.0, *map(abs, t2))])
    return f, float(np.max(np.abs(f) / scale))


def _jacobian(e0, ell, h):
    s2, c2 = math.sin(2.0 * h), math.cos(2.0 * h)
    return np.array([
        [-e0 / ell ** 2 + 2.0 * s2 / ell ** 3, -2.0 * c2 / ell ** 2],
        [2.0 * math.sin(h) ** 2 / ell ** 3, -s2 / ell ** 2],
    ])


def _newton(e0, target, ell, h, tol, max_iter, n):
    f, res = _local_residual(e0, target, ell, h)
    for _ in range(max_iter):
        if res < tol:
            return ell, h, res
        J = _jacobian(e0, ell, h)
        det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
        if abs(det) < DET_FLOOR * max(1.0, float(np.abs(J).max()) ** 2):
            raise StepFailureError(n, res, f"singular Newton matrix stepping to n={n}")
        d_ell, d_h = np.linalg.solve(J, -f)
        step = 1.0
        for _ in range(MAX_HALVINGS + 1):
            new_ell, new_h = ell + step * d_ell, h + step * d_h
            if new_ell > 0:
                new_f, new_res = _local_residual(e0, target, new_ell, new_h)
                if new_res < res or step == 1.0 and new_res < 10 * res:
                    break
            step *= 0.5
        else:
            raise StepFailureError(n, res, f"damped Newton stalled stepping to n={n}")
        ell, h, f, res = new_ell, new_h, new_f, new_res
    if res < tol:
        return ell, h, res
    raise StepFailureError(n, res)


def _nearest_mod_pi(h, ref):
    return h + math.pi * round((ref - h) / math.pi)


def _candidate_roots(e0, target, h_ref, l_ref):
    """All ``(l, h)`` solving the local equations, h taken mod pi nearest ``h_ref``.

    With ``q^2 = -w2`` the second equation gives ``|sin h| = q l``, and the first
    then reduces to ``(a1^2 + 4 q^4) l^2 - 2 e0 a1 l + e0^2 - 4 q^2 = 0``.
    """
    a1, b1 = target
    if b1 > 1e-15 * max(1.0, abs(a1)):
        return []  # would need sin(h)^2 < 0
    q2 = max(-b1, 0.0)
    q = math.sqrt(q2)
    qa = a1 * a1 + 4.0 * q2 * q2
    if qa == 0.0:
        return [(l_ref, _nearest_mod_pi(0.0, h_ref))] if e0 == 0.0 else []
    disc = (e0 * a1) ** 2 - qa * (e0 * e0 - 4.0 * q2)
    if disc < 0.0:
        if disc > -1e-14 * max((e0 * a1) ** 2, qa * e0 * e0, 1e-300):
            disc = 0.0
        else:
            return []
    root = math.sqrt(disc)
    # stable pair of roots
    if e0 * a1 >= 0:
        big = e0 * a1 + root
    else:
        big = e0 * a1 - root
    cands = set()
    if big != 0.0:
        cands.add(big / qa)
        cands.add((e0 * e0 - 4.0 * q2) / big)
    else:
        cands.add(0.0)
    out = []
    for ell in sorted(cands):
        if not ell > 0:
            continue
        if q == 0.0:
            h = 0.0
        else:
            h = math.atan2(q * ell, (e0 - a1 * ell) / (2.0 * q))
        out.append((ell, _nearest_mod_pi(h, h_ref)))
    return out


BRANCHES = ("shortest", "nearest", "continuation")


def elastica_step(state, tol=1e-12, max_iter=50, branch="shortest"):
    """Advance the discrete elastica by one lattice index.

    The vector ``w`` is rotated by ``h_n``; the pair ``(l, h)`` at ``n + 1`` then
    solves two scalar equations.  ``branch`` picks among their solutions:
    ``"shortest"`` takes the smallest positive l, ``"nearest"`` the l closest
    to the current one, both polished by Newton; ``"continuation"`` runs Newton
    from the current values alone.
    """
    if not tol > 0:
        raise InvalidInputError("tol must be positive")
    if branch not in BRANCHES:
        raise InvalidInputError(f"branch must be one of {BRANCHES}")
    n = state.n + 1
    target = rotation(state.h_cur) @ state.w
    e0 = _e_h(state.l_cur, state.h_cur)
    if branch == "continuation":
        seeds = [(state.l_cur, state.h_cur)]
    else:
        seeds = _candidate_roots(e0, target, state.h_cur, state.l_cur)
        if not seeds:
            _, res = _local_residual(e0, target, state.l_cur, state.h_cur)
            raise StepFailureError(n, res, f"no real solution for the step to n={n} "
                                           f"(target w = {target[0]:.6g}, {target[1]:.6g})")
        if branch == "nearest":
            seeds.sort(key=lambda s: abs(s[0] - state.l_cur))
    last = None
    for ell, h in seeds:
        try:
            ell, h, _ = _newton(e0, target, ell, h, tol, max_iter, n)
            break
        except StepFailureError as exc:
            last = exc
    else:
        raise last
    return ElasticaState(n, state.l_cur, ell, state.h_cur, h)


@dataclass(frozen=True)
class ConservationRecord:
    n: int
    V: np.ndarray
    ad: np.ndarray
    c: np.ndarray
    drift: float


@dataclass(frozen=True)
class ElasticaRun:
    """Output of :func:`elastica_run`; ``failure`` holds the error if it stopped early."""

    invariants: InvariantSeries
    curve: DiscreteCurve
    records: list
    thetas: np.ndarray
    failure: object = None

    @property
    def completed(self):
        return self.failure is None

    @property
    def drift_max(self):
        return max((r.drift for r in self.records), default=0.0)

    def first_integral_deviation(self):
        radii = [r.V[0] ** 2 + r.V[1] ** 2 for r in self.records]
        return float(np.ptp(radii)) if radii else 0.0

    def kappabar(self):
        l, h = self.invariants.values.T
        return -np.sin(h) / l


def _records(act, inv, thetas, points, lo, hi):
    records = []
    c0 = None
    for n in range(lo, hi + 1):
        V = act.conservation_vector(inv, n)
        theta = thetas[n - inv.start]
        t = -rotation(theta) @ points[n - inv.start]
        ad = act.adjoint((theta, t[0], t[1]))
        c = V @ ad
        c0 = c if c0 is None else c0
        records.append(ConservationRecord(n, V, ad, c, float(np.max(np.abs(c - c0)))))
    return records


def elastica_run(initial, anchor=(0.0, 0.0, 0.0), steps=100, tol=1e-12, max_iter=50, branch="shortest"):
    """Iterate :func:`elastica_step` from invariant seeds ``(l_-1, h_-1, l_0, h_0)``.

    ``anchor = (x_0, u_0, theta_0)`` places point 0 and the direction of the
    step from it.  On a step failure the run stops and returns what it has,
    with the exception stored in ``failure``.
    """
    if int(steps) < 1:
        raise InvalidInputError("steps must be at least 1")
    l_prev, h_prev, l0, h0 = (float(v) for v in initial)
    x0, u0, theta0 = (float(v) for v in anchor)
    state = ElasticaState(0, l_prev, l0, h_prev, h0)
    rows = [(l_prev, h_prev), (l0, h0)]
    failure = None
    for _ in range(int(steps)):
        try:
            state = elastica_step(state, tol, max_iter, branch)
        except StepFailureError as exc:
            failure = exc
            break
        rows.append((state.l_cur, state.h_cur))
    act = get_action("elastica")
    inv = InvariantSeries("elastica", act.invariant_names, rows, -1)
    # directions and points from the step rule
    ells, hs = inv.values.T
    thetas = theta0 + np.concatenate([[-hs[0]], np.cumsum(np.concatenate([[0.0], hs[1:-1]]))])
    steps_xy = ells[:, None] * np.column_stack([np.cos(thetas), -np.sin(thetas)])
    p0 = np.array([x0, u0])
    points = np.vstack([p0 - steps_xy[0], p0 + np.vstack([[0.0, 0.0], np.cumsum(steps_xy[1:], axis=0)])])
    curve = DiscreteCurve(points, -1, act.components)
    records = _records(act, inv, thetas, points, 0, inv.stop - 1)
    run = ElasticaRun(inv, curve, records, thetas, failure)
    if failure is not None:
        failure.partial = run
    return run


def seed_from_points(points, anchor_index=1):
    """Invariant seed and anchor from four points ``u_-1 .. u_2``."""
    act = get_action("elastica")
    curve = DiscreteCurve(points, -1, act.components)
    inv = act.invariants(curve)
    (l_prev, h_prev), (l0, h0) = inv.row(-1), inv.row(0)
    dx, du = curve.point(1) - curve.point(0)
    x0, u0 = curve.point(0)
    return (l_prev, h_prev, l0, h0), (x0, u0, step_angle(dx, du))
