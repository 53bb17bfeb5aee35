"""Pure-numpy reference implementations of the hot kernels.

All inputs are C-contiguous complex128 arrays: ``basis`` rows are an
orthonormal set, ``vecs`` rows are the vectors being projected.
"""

import numpy as np


def projected_norms_sq(basis, vecs):
    """Squared norm of the projection of each row of ``vecs`` onto the span of ``basis``."""
    if basis.shape[0] == 0:
        return np.zeros(vecs.shape[0])
    coeffs = vecs @ basis.conj().T
    return np.einsum("ij,ij->i", coeffs, coeffs.conj()).real


def project_onto(basis, vecs):
    """Project each row of ``vecs`` onto the span of ``basis`` (no renormalization)."""
    if basis.shape[0] == 0:
        return np.zeros_like(vecs)
    coeffs = vecs @ basis.conj().T
    return coeffs @ basis


def orthonormalize(vectors, eps):
    """Rank-revealing modified Gram-Schmidt over the rows of ``vectors``.

    Rows whose residual norm after projection on the partial basis is <= eps
    are absorbed instead of added. Two projection passes keep the basis
    orthonormal even for nearly dependent input.
    """
    n, d = vectors.shape
    basis = np.empty((n, d), dtype=np.complex128)
    k = 0
    for i in range(n):
        v = vectors[i].copy()
        for _ in range(2):
            if k:
                coeffs = basis[:k].conj() @ v
                v = v - coeffs @ basis[:k]
        nrm = np.sqrt(np.real(np.vdot(v, v)))
        if nrm > eps:
            basis[k] = v / nrm
            k += 1
    return basis[:k].copy()
