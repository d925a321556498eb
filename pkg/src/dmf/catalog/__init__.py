"""Catalogue of group actions, addressable by name."""

import numpy as np

from ..errors import InvalidInputError
from ..frame_engine import noether_first_integral
from . import elastica, scaling, twist
from .base import Action, GroupElement

ACTIONS = {a.name: a for a in (scaling.ACTION, twist.ACTION, elastica.ACTION)}


def get_action(action):
    if isinstance(action, Action):
        return action
    try:
        return ACTIONS[action]
    except KeyError:
        raise InvalidInputError(f"unknown action {action!r}; choose from {sorted(ACTIONS)}") from None


def invariants_from_curve(action, curve):
    return get_action(action).invariants(curve)


def el_residual(action, invariants, n):
    return get_action(action).el_residual(invariants, n)


def conservation_vector(action, invariants, n):
    return get_action(action).conservation_vector(invariants, n)


def ad_of_frame(action, curve, n):
    return get_action(action).ad_of_frame(curve, n)


def closed_form(action, params, n):
    act = get_action(action)
    if act.name == "scaling":
        return scaling.closed_form(params, n)
    if act.name == "twist":
        return twist.closed_form(params, n)
    raise InvalidInputError(f"no closed-form family for {act.name}")


def first_integrals_original(curve, L, n, action="scaling"):
    """Noether first integrals ``A(n, phi)``, one per generator, from FD partials of L."""
    act = get_action(action)
    curve = act.prepare(curve)
    return np.array([
        noether_first_integral(L, curve, n, lambda m, p, r=r: act.phi(p, m)[:, r])
        for r in range(act.group_dim)
    ])


def divergence_check(curve, g, n):
    """``|Lbar(g.z) - Lbar(z)|`` at n for the twist action, where Lbar includes zeta."""
    act = twist.ACTION
    curve = act.prepare(curve)
    if not isinstance(g, GroupElement):
        g = act.element(g)
    L = twist.modified_lagrangian()
    return abs(L.at(act.act(g.params, curve), n) - L.at(curve, n))


__all__ = [
    "ACTIONS", "Action", "GroupElement", "get_action", "invariants_from_curve", "el_residual",
    "conservation_vector", "ad_of_frame", "closed_form", "first_integrals_original",
    "divergence_check", "scaling", "twist", "elastica",
]
