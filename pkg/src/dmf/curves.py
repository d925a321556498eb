"""Lattice data containers: curves, windows and scalar series indexed by n."""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, WindowTooShortError


def _frozen_array(values, ndim, what):
    a = np.array(values, dtype=np.float64)
    if a.ndim == 1 and ndim == 2:
        a = a[:, None]
    if a.ndim != ndim:
        raise InvalidInputError(f"{what} must be {ndim}-dimensional, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError(f"{what} has non-finite entries")
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Window:
    """Copy of the points ``u_lo .. u_hi`` of a curve around base index ``n``."""

    n: int
    lo: int
    hi: int
    points: np.ndarray

    def __post_init__(self):
        pts = _frozen_array(self.points, 2, "window points")
        if not self.lo <= 0 <= self.hi:
            raise InvalidInputError("window offsets must satisfy lo <= 0 <= hi")
        if pts.shape[0] != self.hi - self.lo + 1:
            raise InvalidInputError("window has the wrong number of points")
        object.__setattr__(self, "points", pts)

    def __getitem__(self, j):
        if not self.lo <= j <= self.hi:
            raise WindowTooShortError((j, j), (self.lo, self.hi), what="window")
        return self.points[j - self.lo]

    def replace_point(self, j, point):
        pts = self.points.copy()
        pts[j - self.lo] = point
        return Window(self.n, self.lo, self.hi, pts)


@dataclass(frozen=True)
class DiscreteCurve:
    """Points ``u_n`` for ``n = start .. start + len - 1``.

    ``points`` has shape ``(N, q)``; ``components`` names the q columns.
    """

    points: np.ndarray
    start: int = 0
    components: tuple = ()

    def __post_init__(self):
        pts = _frozen_array(self.points, 2, "curve points")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "start", int(self.start))
        comps = tuple(self.components) or tuple(f"u{i}" for i in range(pts.shape[1]))
        if len(comps) != pts.shape[1]:
            raise InvalidInputError("one component name per column is required")
        object.__setattr__(self, "components", comps)

    def __len__(self):
        return self.points.shape[0]

    @property
    def stop(self):
        """One past the last index."""
        return self.start + len(self)

    @property
    def indices(self):
        return np.arange(self.start, self.stop)

    @property
    def dim(self):
        return self.points.shape[1]

    def require(self, lo, hi):
        if lo < self.start or hi >= self.stop:
            raise WindowTooShortError((lo, hi), (self.start, self.stop - 1), what="curve")

    def point(self, n):
        self.require(n, n)
        return self.points[n - self.start]

    def window(self, n, lo, hi):
        self.require(n + lo, n + hi)
        i = n + lo - self.start
        return Window(n, lo, hi, self.points[i:i + hi - lo + 1].copy())

    def column(self, name):
        return Series(self.points[:, self.components.index(name)], self.start)

    def with_points(self, points):
        return DiscreteCurve(points, self.start, self.components)


@dataclass(frozen=True)
class Series:
    """Scalar sequence ``F(n)`` on a contiguous index range; call it with ``n``."""

    values: np.ndarray
    start: int = 0

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64).reshape(-1)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "start", int(self.start))

    def __len__(self):
        return self.values.shape[0]

    @property
    def stop(self):
        return self.start + len(self)

    def __call__(self, n):
        i = n - self.start
        if i < 0 or i >= len(self):
            raise WindowTooShortError((n, n), (self.start, self.stop - 1))
        return float(self.values[i])

    @classmethod
    def from_function(cls, fn, lo, hi):
        return cls([fn(n) for n in range(lo, hi + 1)], lo)


@dataclass(frozen=True)
class InvariantSeries:
    """Per-n generating invariants of one catalogue action."""

    action: str
    names: tuple
    values: np.ndarray
    start: int = 0
    _columns: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[1] != len(self.names):
            raise InvalidInputError("invariant values must be (N, number of invariants)")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "start", int(self.start))
        cols = {name: Series(v[:, i], self.start) for i, name in enumerate(self.names)}
        object.__setattr__(self, "_columns", cols)

    def __len__(self):
        return self.values.shape[0]

    @property
    def stop(self):
        return self.start + len(self)

    @property
    def indices(self):
        return np.arange(self.start, self.stop)

    def __getitem__(self, name):
        return self._columns[name]

    def require(self, lo, hi):
        if lo < self.start or hi >= self.stop:
            raise WindowTooShortError((lo, hi), (self.start, self.stop - 1), what="invariant series")

    def row(self, n):
        self.require(n, n)
        return self.values[n - self.start]

    def window(self, n, lo, hi):
        """Rows ``n + lo .. n + hi`` as an array."""
        self.require(n + lo, n + hi)
        i = n + lo - self.start
        return self.values[i:i + hi - lo + 1]

    def as_curve(self):
        """View the invariants as a curve, e.g. to apply the Euler operator to them."""
        return DiscreteCurve(self.values, self.start, self.names)
