"""Difference moving frames, invariant variational integrators and the discrete elastica."""

from . import errors, lie_core, frame_engine, catalog, solvers, smooth
from .catalog import ACTIONS, get_action
from .curves import DiscreteCurve, InvariantSeries, Series
from .errors import DMFError
from .solvers import elastica_run, elastica_step, ElasticaState
from .smooth import rkf45_integrate, compare_run, converge

__version__ = "0.1.0"

__all__ = [
    "errors", "lie_core", "frame_engine", "catalog", "solvers", "smooth",
    "ACTIONS", "get_action", "DiscreteCurve", "InvariantSeries", "Series", "DMFError",
    "elastica_run", "elastica_step", "ElasticaState", "rkf45_integrate", "compare_run", "converge",
]
