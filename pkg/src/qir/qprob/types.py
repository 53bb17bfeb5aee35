"""Domain types of the probability kernel.

All values are immutable after construction (arrays are marked
read-only), so they can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ..errors import DimensionError, NormalizationError, ParameterError

NORM_ATOL = 1e-10
WEIGHT_SUM_ATOL = 1e-10
ORTHO_ATOL = 1e-10


def _as_complex_vector(values) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128, order="C")
    if arr.ndim != 1 or arr.shape[0] < 1:
        raise DimensionError("amplitudes must be a 1-d sequence with dim >= 1")
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class StateVector:
    """Unit-norm complex vector: a fully specified information need."""

    amplitudes: np.ndarray

    def __post_init__(self):
        arr = _as_complex_vector(self.amplitudes)
        nrm = float(np.linalg.norm(arr))
        if abs(nrm - 1.0) > NORM_ATOL:
            raise NormalizationError(
                f"state vector norm is {nrm!r}, expected 1 (normalize explicitly)"
            )
        object.__setattr__(self, "amplitudes", _frozen(arr))

    @classmethod
    def normalized(cls, values) -> "StateVector":
        """Build a state from any nonzero vector, dividing by its norm."""
        arr = _as_complex_vector(values)
        nrm = float(np.linalg.norm(arr))
        if nrm == 0.0 or not np.isfinite(nrm):
            raise NormalizationError("cannot normalize a zero or non-finite vector")
        return cls(arr / nrm)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]


@dataclass(frozen=True)
class Subspace:
    """Orthonormal row basis of a subspace.

    Stands in for the induced projector P = sum_j |b_j><b_j|, i.e. the
    yes/no observable asking "does the need lie in this region". An
    empty basis (k = 0 rows) is the zero subspace; k = dim rows is the
    full space.
    """

    basis: np.ndarray

    def __post_init__(self):
        arr = np.array(self.basis, dtype=np.complex128, order="C")
        if arr.ndim != 2 or arr.shape[1] < 1:
            raise DimensionError("basis must be a (k, dim) array with dim >= 1")
        k = arr.shape[0]
        if k:
            gram = arr @ arr.conj().T
            if not np.allclose(gram, np.eye(k), atol=ORTHO_ATOL, rtol=0.0):
                raise NormalizationError("basis rows are not orthonormal")
        object.__setattr__(self, "basis", _frozen(arr))

    @classmethod
    def zero(cls, dim: int) -> "Subspace":
        return cls(np.zeros((0, dim), dtype=np.complex128))

    @classmethod
    def full(cls, dim: int) -> "Subspace":
        return cls(np.eye(dim, dtype=np.complex128))

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def rank(self) -> int:
        return self.basis.shape[0]


@dataclass(frozen=True)
class Ensemble:
    """Factorized density operator: weighted mixture of pure states.

    Represents rho = sum_i w_i |v_i><v_i| as the weight vector plus the
    stacked component states, never as a dense dim x dim matrix. Weights
    are strictly positive and sum to one.
    """

    weights: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64, order="C")
        v = np.array(self.vectors, dtype=np.complex128, order="C")
        if w.ndim != 1 or v.ndim != 2 or w.shape[0] != v.shape[0]:
            raise DimensionError("weights (r,) and vectors (r, dim) must align")
        if w.shape[0] < 1 or v.shape[1] < 1:
            raise DimensionError("ensemble needs at least one component")
        if np.any(w <= 0.0):
            raise NormalizationError("ensemble weights must be strictly positive")
        total = float(w.sum())
        if abs(total - 1.0) > WEIGHT_SUM_ATOL:
            raise NormalizationError(
                f"ensemble weights sum to {total!r}, expected 1"
            )
        norms = np.linalg.norm(v, axis=1)
        if np.any(np.abs(norms - 1.0) > NORM_ATOL):
            raise NormalizationError("ensemble component states must be unit norm")
        object.__setattr__(self, "weights", _frozen(w))
        object.__setattr__(self, "vectors", _frozen(v))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, StateVector]]) -> "Ensemble":
        pairs = list(pairs)
        if not pairs:
            raise DimensionError("ensemble needs at least one component")
        weights = np.array([p for p, _ in pairs], dtype=np.float64)
        vectors = np.vstack([s.amplitudes for _, s in pairs])
        return cls(weights, vectors)

    @property
    def components(self) -> tuple[tuple[float, StateVector], ...]:
        return tuple(
            (float(w), StateVector(v)) for w, v in zip(self.weights, self.vectors)
        )

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def rank(self) -> int:
        """Number of retained components (upper bound on operator rank)."""
        return self.weights.shape[0]


@dataclass(frozen=True)
class Tolerances:
    """Numerical control knobs threaded through the kernel operations.

    merge_parallel enables collapsing near-parallel ensemble components
    by weight addition after condition/alpha_update; off by default.
    """

    rank_eps: float = 1e-6
    ortho_eps: float = 1e-8
    zero_prob_eps: float = 1e-12
    merge_parallel: bool = False

    def __post_init__(self):
        for name in ("rank_eps", "ortho_eps", "zero_prob_eps"):
            value = getattr(self, name)
            if not (0.0 < value < 1e-2):
                raise ParameterError(
                    f"{name} must be strictly positive and < 1e-2, got {value!r}"
                )


DEFAULT_TOLERANCES = Tolerances()
