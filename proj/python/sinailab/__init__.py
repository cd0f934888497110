"""Python access to the sinailab simulation core."""

import json

from ._sinailab import (
    BudgetError,
    IoError,
    Potential,
    RngStream,
    UsageError,
    bessel_i,
    bessel_k,
    exit_area_samples,
    exp_weighted_area_laplace,
    exp_weighted_area_laplace_normalized,
    identity_names,
    kotani_fixed_point,
    kotani_rhs,
    lemma23_laplace_reference,
    simulate_xi,
)
from . import _sinailab

__all__ = [
    "BudgetError",
    "IoError",
    "Potential",
    "RngStream",
    "UsageError",
    "bessel_i",
    "bessel_k",
    "default_config",
    "estimate",
    "exit_area_samples",
    "exp_weighted_area_laplace",
    "exp_weighted_area_laplace_normalized",
    "identity_names",
    "kotani_fixed_point",
    "kotani_rhs",
    "lemma23_laplace_reference",
    "simulate_xi",
    "verify",
]


def default_config(command="verify", target=""):
    return json.loads(_sinailab.default_config(command, target))


def verify(identity, **overrides):
    """Run one identity check; returns the report as a dict."""
    return json.loads(_sinailab.verify(identity, json.dumps(overrides) if overrides else ""))


def estimate(kind, **overrides):
    return json.loads(_sinailab.estimate(kind, json.dumps(overrides) if overrides else ""))
