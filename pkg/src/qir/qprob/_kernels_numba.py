"""Numba-jitted kernels, arithmetic-equivalent to :mod:`._kernels_numpy`."""

import numpy as np
from numba import njit


@njit(cache=True)
def projected_norms_sq(basis, vecs):
    k, d = basis.shape
    r = vecs.shape[0]
    out = np.zeros(r)
    for i in range(r):
        acc = 0.0
        for j in range(k):
            c = 0.0 + 0.0j
            for t in range(d):
                c += np.conj(basis[j, t]) * vecs[i, t]
            acc += c.real * c.real + c.imag * c.imag
        out[i] = acc
    return out


@njit(cache=True)
def project_onto(basis, vecs):
    k, d = basis.shape
    r = vecs.shape[0]
    out = np.zeros((r, d), dtype=np.complex128)
    for i in range(r):
        for j in range(k):
            c = 0.0 + 0.0j
            for t in range(d):
                c += np.conj(basis[j, t]) * vecs[i, t]
            for t in range(d):
                out[i, t] += c * basis[j, t]
    return out


@njit(cache=True)
def orthonormalize(vectors, eps):
    n, d = vectors.shape
    basis = np.empty((n, d), dtype=np.complex128)
    k = 0
    for i in range(n):
        v = vectors[i].copy()
        for _ in range(2):
            for j in range(k):
                c = 0.0 + 0.0j
                for t in range(d):
                    c += np.conj(basis[j, t]) * v[t]
                for t in range(d):
                    v[t] -= c * basis[j, t]
        acc = 0.0
        for t in range(d):
            acc += v[t].real * v[t].real + v[t].imag * v[t].imag
        nrm = np.sqrt(acc)
        if nrm > eps:
            for t in range(d):
                basis[k, t] = v[t] / nrm
            k += 1
    return basis[:k].copy()
