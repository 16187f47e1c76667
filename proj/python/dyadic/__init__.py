"""Python bindings for the dyadic library."""

import json

from ._dyadic import (
    ConfigError,
    ConvergenceError,
    Error,
    Field,
    Grid,
    LPFamily,
    NumericDomainError,
    PreconditionError,
    StructuralError,
    apply_direct,
    d_s,
    delta_j,
    derivative_budget,
    dilate_dyadic,
    j_s,
    l2_norm,
    norm,
    random_band_limited,
    s_j,
)
from ._dyadic import paraproduct_coefficients as _coefficients
from ._dyadic import run_config as _run_config


def paraproduct_coefficients(symbol, grid, a_max=4, decay=None):
    return json.loads(_coefficients(symbol, grid, a_max, decay))


def run_config(text, seed=None, grid=None, dim=None):
    """Run a YAML config given as text; returns one report dict per experiment."""
    return [json.loads(r) for r in _run_config(text, seed, grid, dim)]


def run_config_file(path, **overrides):
    with open(path) as fh:
        return run_config(fh.read(), **overrides)


__all__ = [name for name in dir() if not name.startswith("_")]
