"""Error bounds for risk-sensitive cost approximation.

Thin wrapper over the compiled ``_core`` module; JSON reports are decoded
into dictionaries here.
"""

import json

from . import _core
from ._core import (
    DomainError,
    Error,
    PreconditionError,
    RankError,
    SchemaError,
    StructureError,
    induced_one_norm,
    perron_pair,
    spectral_radius,
    stationary_distribution,
    projected_system,
)

__all__ = [
    "DomainError",
    "Error",
    "PreconditionError",
    "RankError",
    "SchemaError",
    "StructureError",
    "analyze",
    "bound_report",
    "generate_example",
    "induced_one_norm",
    "perron_pair",
    "projected_system",
    "simulate",
    "spectral_radius",
    "stationary_distribution",
    "validate_chain",
]


def _encode(document):
    return document if isinstance(document, str) else json.dumps(document)


def validate_chain(p):
    return json.loads(_core.validate_chain(p))


def bound_report(a, b):
    return json.loads(_core.bound_report(a, b))


def analyze(document):
    """Full analysis of a problem document (dict or JSON text)."""
    return json.loads(_core.analyze(_encode(document)))


def generate_example(kind, s, p=0.0, q=0.0, qprime=0.0, eps=0.0):
    family = {"kind": kind, "s": s, "p": p, "q": q, "qprime": qprime, "eps": eps}
    return json.loads(_core.generate_example(json.dumps(family)))


def simulate(document, algorithm, horizon, seed=0):
    """Returns (summary dict, list of per-step estimates)."""
    summary, estimates = _core.simulate(_encode(document), algorithm, horizon, seed)
    return json.loads(summary), estimates
