"""Kernel operations: trace-rule probabilities, measurement conditioning,
soft feedback updates, and subspace algebra.

Every operation is a pure function over the immutable types in
:mod:`.types`; none of them ever materializes a dense operator except
:func:`to_dense`, which exists for tests and diagnostics only.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import (
    DegenerateSuperpositionError,
    DimensionError,
    ImpossibleMeasurementError,
    NormalizationError,
    ParameterError,
    SizeError,
)
from ._backend import orthonormalize, project_onto, projected_norms_sq
from .types import DEFAULT_TOLERANCES, Ensemble, StateVector, Subspace, Tolerances

DENSE_DIM_LIMIT = 64

PARALLEL_OVERLAP = 1.0 - 1e-8


def _check_dims(a: int, b: int) -> None:
    if a != b:
        raise DimensionError(f"dimension mismatch: {a} != {b}")


def make_pure(v: StateVector) -> Ensemble:
    """Density operator |v><v| of a fully specified need."""
    return Ensemble(np.ones(1), v.amplitudes[np.newaxis, :])


def make_mixture(pairs: Sequence[tuple[float, Ensemble]]) -> Ensemble:
    """Convex combination of ensembles.

    Probabilities must be nonnegative and sum to one; zero-probability
    entries are dropped so the result keeps only strictly positive weights.
    """
    if not pairs:
        raise ParameterError("mixture needs at least one component ensemble")
    probs = np.array([p for p, _ in pairs], dtype=np.float64)
    if np.any(probs < 0.0):
        raise NormalizationError("mixture probabilities must be nonnegative")
    total = float(probs.sum())
    if abs(total - 1.0) > 1e-10:
        raise NormalizationError(f"mixture probabilities sum to {total!r}, expected 1")
    dims = {e.dim for _, e in pairs}
    if len(dims) != 1:
        raise DimensionError(f"mixture components span several dims: {sorted(dims)}")

    weights = np.concatenate([p * e.weights for p, e in pairs])
    vectors = np.vstack([e.vectors for _, e in pairs])
    keep = weights > 0.0
    weights, vectors = weights[keep], vectors[keep]
    return Ensemble(weights / weights.sum(), vectors)


def superpose(
    coeffs: Sequence[complex], vectors: Sequence[StateVector]
) -> StateVector:
    """Normalized linear combination sum_j c_j |v_j>: a new pure need.

    The output is always renormalized, so callers need not pick
    norm-preserving coefficients.
    """
    if len(coeffs) != len(vectors) or not vectors:
        raise ParameterError("need matching, nonempty coefficient and vector lists")
    dims = {v.dim for v in vectors}
    if len(dims) != 1:
        raise DimensionError(f"superposed vectors span several dims: {sorted(dims)}")
    combo = np.zeros(vectors[0].dim, dtype=np.complex128)
    for c, v in zip(coeffs, vectors):
        combo += complex(c) * v.amplitudes
    nrm = float(np.linalg.norm(combo))
    if nrm <= 1e-14:
        raise DegenerateSuperpositionError("linear combination is (numerically) zero")
    return StateVector(combo / nrm)


def probability(rho: Ensemble, a: Subspace) -> float:
    """Trace-rule probability tr(rho P_A) of the yes/no observable.

    Evaluated in factorized form as sum_i w_i ||P_A v_i||^2, clipped to
    [0, 1] against roundoff.
    """
    _check_dims(rho.dim, a.dim)
    norms_sq = projected_norms_sq(a.basis, rho.vectors)
    p = float(np.dot(rho.weights, norms_sq))
    return min(max(p, 0.0), 1.0)


def _merge_parallel(weights: np.ndarray, vectors: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Collapse components whose states are parallel up to phase."""
    kept_w: list[float] = []
    kept_v: list[np.ndarray] = []
    for w, v in zip(weights, vectors):
        for idx, u in enumerate(kept_v):
            if abs(np.vdot(u, v)) > PARALLEL_OVERLAP:
                kept_w[idx] += w
                break
        else:
            kept_w.append(float(w))
            kept_v.append(v)
    return np.array(kept_w), np.vstack(kept_v)


def _finalize(weights: np.ndarray, vectors: np.ndarray, tol: Tolerances) -> Ensemble:
    """Drop negligible components, optionally merge parallel ones, renormalize."""
    keep = weights > tol.rank_eps
    if not np.any(keep):
        keep = weights == weights.max()
    weights, vectors = weights[keep], vectors[keep]
    if tol.merge_parallel and weights.shape[0] > 1:
        weights, vectors = _merge_parallel(weights, vectors)
    return Ensemble(weights / weights.sum(), vectors)


def condition(
    rho: Ensemble, a: Subspace, tol: Tolerances = DEFAULT_TOLERANCES
) -> Ensemble:
    """Post-measurement state: project onto the subspace and renormalize.

    Component v_i goes to P_A v_i (renormalized) with new weight
    w_i ||P_A v_i||^2 / tr(rho P_A). Raises ImpossibleMeasurementError
    when the observable's probability is numerically zero, i.e. the
    observation contradicts the state.
    """
    _check_dims(rho.dim, a.dim)
    norms_sq = projected_norms_sq(a.basis, rho.vectors)
    total = float(np.dot(rho.weights, norms_sq))
    if total <= tol.zero_prob_eps:
        raise ImpossibleMeasurementError(
            f"measurement probability {total:.3e} is numerically zero"
        )
    new_weights = rho.weights * norms_sq / total
    keep = new_weights > tol.rank_eps
    if not np.any(keep):
        keep = new_weights == new_weights.max()
    projected = project_onto(a.basis, rho.vectors[keep])
    projected /= np.sqrt(norms_sq[keep])[:, np.newaxis]
    weights = new_weights[keep]
    if tol.merge_parallel and weights.shape[0] > 1:
        weights, projected = _merge_parallel(weights, projected)
    return Ensemble(weights / weights.sum(), projected)


def alpha_update(
    rho: Ensemble,
    a: Subspace,
    alpha: float,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Ensemble:
    """Soft measurement: with probability alpha the state was projected,
    with probability 1 - alpha it stayed put.

    alpha = 1 is exactly :func:`condition`; alpha = 0 leaves the state
    unchanged. This is the geometric generalization of incremental
    relevance-feedback updates: each component splits into a projected
    copy and an inert copy instead of a single drifting query vector.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ParameterError(f"alpha must lie in [0, 1], got {alpha!r}")
    _check_dims(rho.dim, a.dim)
    if alpha == 0.0:
        return rho
    conditioned = condition(rho, a, tol)
    if alpha == 1.0:
        return conditioned
    weights = np.concatenate([alpha * conditioned.weights, (1.0 - alpha) * rho.weights])
    vectors = np.vstack([conditioned.vectors, rho.vectors])
    return _finalize(weights, vectors, tol)


def span(
    vectors: Sequence[StateVector], tol: Tolerances = DEFAULT_TOLERANCES
) -> Subspace:
    """Subspace spanned by the given states (rank-revealing)."""
    if not vectors:
        raise ParameterError("span of an empty vector list is undefined")
    dims = {v.dim for v in vectors}
    if len(dims) != 1:
        raise DimensionError(f"spanned vectors live in several dims: {sorted(dims)}")
    stacked = np.vstack([v.amplitudes for v in vectors])
    return Subspace(orthonormalize(stacked, tol.ortho_eps))


def span_rows(rows: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES) -> Subspace:
    """As :func:`span` but over a prestacked (n, dim) complex array."""
    if rows.ndim != 2 or rows.shape[0] < 1:
        raise ParameterError("span_rows needs a nonempty (n, dim) array")
    stacked = np.ascontiguousarray(rows, dtype=np.complex128)
    return Subspace(orthonormalize(stacked, tol.ortho_eps))


def join(a: Subspace, b: Subspace, tol: Tolerances = DEFAULT_TOLERANCES) -> Subspace:
    """Smallest subspace containing both operands (span of the union)."""
    _check_dims(a.dim, b.dim)
    if a.rank == 0 and b.rank == 0:
        return Subspace.zero(a.dim)
    stacked = np.vstack([a.basis, b.basis])
    return Subspace(orthonormalize(stacked, tol.ortho_eps))


def complement(a: Subspace) -> Subspace:
    """Orthogonal complement; the geometric negation of the observable."""
    d, k = a.dim, a.rank
    if k == 0:
        return Subspace.full(d)
    # Kets x with <b_j|x> = 0 for all j are the null space of conj(basis);
    # the trailing right-singular vectors provide an orthonormal basis for it.
    _, _, vh = np.linalg.svd(a.basis.conj(), full_matrices=True)
    return Subspace(np.ascontiguousarray(vh[k:].conj()))


def to_dense(x: Ensemble | Subspace, max_dim: int = DENSE_DIM_LIMIT) -> np.ndarray:
    """Dense operator matrix (rho or P). Test/diagnostic bridge only."""
    if x.dim > max_dim:
        raise SizeError(f"dense expansion of dim {x.dim} exceeds bound {max_dim}")
    if isinstance(x, Ensemble):
        return (x.vectors.T * x.weights) @ x.vectors.conj()
    if isinstance(x, Subspace):
        return x.basis.T @ x.basis.conj()
    raise TypeError(f"expected Ensemble or Subspace, got {type(x).__name__}")


def dense_to_json(matrix: np.ndarray) -> list[list[list[float]]]:
    """Row-major nested lists of [re, im] pairs, for test fixtures."""
    return [
        [[float(entry.real), float(entry.imag)] for entry in row] for row in matrix
    ]


def dense_from_json(data: Sequence[Sequence[Sequence[float]]]) -> np.ndarray:
    arr = np.array(data, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ParameterError("expected nested [re, im] pairs in row-major order")
    return arr[..., 0] + 1j * arr[..., 1]
