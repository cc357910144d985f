"""Pure-numpy implementations of the hot kernels.

These are the fallback used when the compiled extension is unavailable.
Both backends implement the same contract and are cross-checked in tests.
"""

import numpy as np

# Matmul blocks are sized so the (rows x codewords) scratch stays ~32 MB.
_BLOCK_ELEMS = 2 << 20


def best_cos2(directions: np.ndarray, codebook: np.ndarray):
    """Quantize each row of `directions` against `codebook`.

    Returns ``(cos2, idx)`` where ``cos2[i] = max_l |codebook[l] . conj(directions[i])|**2``
    and ``idx[i]`` is the first index attaining the maximum.
    """
    directions = np.ascontiguousarray(directions, dtype=np.complex128)
    codebook = np.ascontiguousarray(codebook, dtype=np.complex128)
    m = directions.shape[0]
    cos2 = np.empty(m, dtype=np.float64)
    idx = np.empty(m, dtype=np.int64)
    rows = max(1, _BLOCK_ELEMS // max(1, codebook.shape[0]))
    ch = codebook.conj().T
    for lo in range(0, m, rows):
        hi = min(m, lo + rows)
        corr = np.abs(directions[lo:hi] @ ch) ** 2
        idx[lo:hi] = np.argmax(corr, axis=1)
        cos2[lo:hi] = np.take_along_axis(corr, idx[lo:hi, None], axis=1)[:, 0]
    return cos2, idx


def max_offdiag_correlation(vectors: np.ndarray) -> float:
    """Largest |<v_i, v_j>| over distinct pairs of rows."""
    vectors = np.ascontiguousarray(vectors, dtype=np.complex128)
    m = vectors.shape[0]
    if m < 2:
        return 0.0
    best = 0.0
    rows = max(1, _BLOCK_ELEMS // m)
    vh = vectors.conj().T
    for lo in range(0, m, rows):
        hi = min(m, lo + rows)
        gram = np.abs(vectors[lo:hi] @ vh)
        for k in range(lo, hi):
            gram[k - lo, k] = 0.0
        best = max(best, float(gram.max()))
    return best


def worst_pair(vectors: np.ndarray):
    """Index pair (i, j), i < j, with the largest |<v_i, v_j>|, and that value."""
    vectors = np.ascontiguousarray(vectors, dtype=np.complex128)
    m = vectors.shape[0]
    gram = np.abs(vectors @ vectors.conj().T)
    np.fill_diagonal(gram, 0.0)
    flat = int(np.argmax(gram))
    i, j = divmod(flat, m)
    if i > j:
        i, j = j, i
    return i, j, float(gram[i, j])
