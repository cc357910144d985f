# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: codebook quantization and pairwise-correlation scans.

Same contract as ``_pykernels``; selected at import by ``sld.kernels``.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def best_cos2(cnp.complex128_t[:, ::1] directions, cnp.complex128_t[:, ::1] codebook):
    """Per row of `directions`, the max squared correlation over the codebook.

    Returns (cos2, idx); ties resolved to the lowest codebook index.
    """
    cdef Py_ssize_t m = directions.shape[0]
    cdef Py_ssize_t n = directions.shape[1]
    cdef Py_ssize_t mc = codebook.shape[0]
    if codebook.shape[1] != n:
        raise ValueError("dimension mismatch between directions and codebook")

    cos2_arr = np.empty(m, dtype=np.float64)
    idx_arr = np.empty(m, dtype=np.int64)
    cdef double[::1] cos2 = cos2_arr
    cdef long long[::1] idx = idx_arr

    cdef Py_ssize_t i, l, k
    cdef double best, mag, re, im
    cdef double complex acc
    with nogil:
        for i in range(m):
            best = -1.0
            for l in range(mc):
                acc = 0
                for k in range(n):
                    acc = acc + codebook[l, k].conjugate() * directions[i, k]
                re = acc.real
                im = acc.imag
                mag = re * re + im * im
                if mag > best:
                    best = mag
                    idx[i] = l
            cos2[i] = best
    return cos2_arr, idx_arr


def max_offdiag_correlation(cnp.complex128_t[:, ::1] vectors):
    """Largest |<v_i, v_j>| over distinct pairs of rows."""
    cdef Py_ssize_t m = vectors.shape[0]
    cdef Py_ssize_t n = vectors.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double best = 0.0
    cdef double mag, re, im
    cdef double complex acc
    if m < 2:
        return 0.0
    with nogil:
        for i in range(m):
            for j in range(i + 1, m):
                acc = 0
                for k in range(n):
                    acc = acc + vectors[i, k].conjugate() * vectors[j, k]
                re = acc.real
                im = acc.imag
                mag = re * re + im * im
                if mag > best:
                    best = mag
    return float(np.sqrt(best))


def worst_pair(cnp.complex128_t[:, ::1] vectors):
    """Index pair (i, j), i < j, with the largest |<v_i, v_j>|, and that value."""
    cdef Py_ssize_t m = vectors.shape[0]
    cdef Py_ssize_t n = vectors.shape[1]
    cdef Py_ssize_t i, j, k
    cdef Py_ssize_t bi = 0, bj = 1
    cdef double best = -1.0
    cdef double mag, re, im
    cdef double complex acc
    if m < 2:
        raise ValueError("need at least two vectors")
    with nogil:
        for i in range(m):
            for j in range(i + 1, m):
                acc = 0
                for k in range(n):
                    acc = acc + vectors[i, k].conjugate() * vectors[j, k]
                re = acc.real
                im = acc.imag
                mag = re * re + im * im
                if mag > best:
                    best = mag
                    bi = i
                    bj = j
    return int(bi), int(bj), float(np.sqrt(best))
