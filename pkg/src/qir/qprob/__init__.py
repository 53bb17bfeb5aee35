"""Quantum-probability kernel: states, subspaces, ensembles, measurements."""

from ._backend import backend_name
from .ops import (
    DENSE_DIM_LIMIT,
    alpha_update,
    complement,
    condition,
    dense_from_json,
    dense_to_json,
    join,
    make_mixture,
    make_pure,
    probability,
    span,
    span_rows,
    superpose,
    to_dense,
)
from .types import DEFAULT_TOLERANCES, Ensemble, StateVector, Subspace, Tolerances

__all__ = [
    "DEFAULT_TOLERANCES",
    "DENSE_DIM_LIMIT",
    "Ensemble",
    "StateVector",
    "Subspace",
    "Tolerances",
    "alpha_update",
    "backend_name",
    "complement",
    "condition",
    "dense_from_json",
    "dense_to_json",
    "join",
    "make_mixture",
    "make_pure",
    "probability",
    "span",
    "span_rows",
    "superpose",
    "to_dense",
]
