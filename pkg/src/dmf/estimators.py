"""Thin scikit-learn adapters over the catalogue.

Each sample is one window of consecutive points, flattened row by row, so a
batch of windows goes through a ``Pipeline`` like any feature matrix.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted, validate_data

from .catalog import get_action
from .curves import DiscreteCurve


class _WindowTransformer(TransformerMixin, BaseEstimator):
    def __init__(self, action="scaling", start=0):
        self.action = action
        self.start = start

    def _window_size(self, act):
        return act.invariant_span[1] - act.invariant_span[0] + 1

    def fit(self, X, y=None):
        act = get_action(self.action)
        X = validate_data(self, X, reset=True)
        q = len(act.components) if act.name != "twist" else None
        width = self._window_size(act)
        dims = [q] if q else [2, 3]
        for d in dims:
            if X.shape[1] == width * d:
                self.point_dim_ = d
                break
        else:
            raise ValueError(f"{act.name} windows need {width} points of dimension {dims}, "
                             f"got {X.shape[1]} features")
        self.window_size_ = width
        return self

    def _windows(self, X):
        check_is_fitted(self)
        X = validate_data(self, X, reset=False)
        act = get_action(self.action)
        for row in X:
            pts = row.reshape(self.window_size_, self.point_dim_)
            yield act, act.prepare(DiscreteCurve(pts, self.start, act.components[: self.point_dim_]))


class WindowInvariants(_WindowTransformer):
    """Generating invariants at the first point of each window."""

    def transform(self, X):
        return np.array([act.invariants_at(curve, self.start) for act, curve in self._windows(X)])

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self)
        return np.array(get_action(self.action).invariant_names, dtype=object)


class WindowNormalizer(_WindowTransformer):
    """Each window moved by its own frame, so its first point is in normal position."""

    def transform(self, X):
        out = []
        for act, curve in self._windows(X):
            moved = act.normalize(curve, self.start).points[:, : self.point_dim_]
            out.append(moved.ravel())
        return np.array(out)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self)
        comps = get_action(self.action).components[: self.point_dim_]
        return np.array([f"{c}{j}" for j in range(self.window_size_) for c in comps], dtype=object)
