# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.  Reference semantics live in pykernels.py.

The pivot arithmetic reproduces the numpy expression elementwise (reciprocal
multiply, then one product and one subtraction per cell; FMA is disabled via
compiler flags), so both backends walk identical simplex paths.  The
multilinear contraction accumulates in a fixed loop order, which can differ
from BLAS in the last ulp; argmax tie-breaking is first-in-C-order on both
sides.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


def pivot_update(cnp.float64_t[:, ::1] T, Py_ssize_t prow, Py_ssize_t pcol):
    """Gauss pivot on row `prow`, column `pcol`, in place, all rows of T."""
    cdef Py_ssize_t nrows = T.shape[0]
    cdef Py_ssize_t ncols = T.shape[1]
    cdef cnp.float64_t inv = 1.0 / T[prow, pcol]
    cdef cnp.float64_t c
    cdef Py_ssize_t i, j
    for j in range(ncols):
        T[prow, j] = T[prow, j] * inv
    for i in range(nrows):
        if i == prow:
            continue
        c = T[i, pcol]
        if c != 0.0:
            for j in range(ncols):
                T[i, j] = T[i, j] - c * T[prow, j]
    for i in range(nrows):
        T[i, pcol] = 0.0
    T[prow, pcol] = 1.0


def multilinear_max(z, V):
    """Max of |<z, v_{i1} x ... x v_{id}>| over rows of V in every slot.

    Returns (value, index tuple); first maximum in C-order wins.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=1] cur = \
        np.ascontiguousarray(z, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=2] WT = \
        np.ascontiguousarray(np.transpose(V).astype(np.float64))
    cdef Py_ssize_t d = np.ndim(z)
    cdef Py_ssize_t n = WT.shape[0]
    cdef Py_ssize_t K = WT.shape[1]
    cdef Py_ssize_t step, rest, r, k, a, i, size, pos, off
    cdef cnp.float64_t best, v, va
    cdef cnp.ndarray[cnp.float64_t, ndim=1] nxt

    for step in range(d):
        rest = cur.shape[0] // n
        nxt = np.zeros(rest * K, dtype=np.float64)
        # cur holds axes (a, REST); the contracted slot's vertex axis is
        # appended last, matching tensordot(G, V, axes=([0], [1])).  Each
        # output accumulates over a in ascending order.
        for r in range(rest):
            off = r
            for a in range(n):
                va = cur[off]
                off += rest
                for k in range(K):
                    nxt[r * K + k] = nxt[r * K + k] + va * WT[a, k]
        cur = nxt

    size = cur.shape[0]
    best = -1.0
    pos = 0
    for i in range(size):
        v = fabs(cur[i])
        if v > best:
            best = v
            pos = i
    idx = []
    for step in range(d):
        idx.append(pos % K)
        pos //= K
    idx.reverse()
    return float(best), tuple(idx)
