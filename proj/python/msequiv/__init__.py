"""Construct high-dimensional gene regulatory network models that are
multistability equivalent to a low-dimensional one, and verify them."""

import json

from ._core import (
    InputError,
    Model,
    NumericalError,
    check_structure,
    construct,
    continue_branch,
    load_model,
    load_sign_matrix,
    model_from_json,
    msc_default_rates,
    msc_low_dim,
    msc_sign_matrix,
    nyquist,
    simulate,
)
from . import _core


def steady_states(model, starts=2000, seed=0):
    """Steady states in the box, as dicts with x, eigenvalues and unstable_count."""
    return json.loads(_core.steady_states_json(model, starts, seed))


def equivalence(low, high, nyquist=True, seed=0):
    """The equivalence report as a dict; report["verdict"] is the overall answer."""
    return json.loads(_core.equivalence_json(low, high, nyquist, seed))


__all__ = [
    "InputError",
    "Model",
    "NumericalError",
    "check_structure",
    "construct",
    "continue_branch",
    "equivalence",
    "load_model",
    "load_sign_matrix",
    "model_from_json",
    "msc_default_rates",
    "msc_low_dim",
    "msc_sign_matrix",
    "nyquist",
    "simulate",
    "steady_states",
]
