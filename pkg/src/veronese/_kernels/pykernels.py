"""Numpy fallback implementations of the hot kernels.

Semantics here are the reference.  The compiled kernels reproduce the pivot
arithmetic exactly (identical elementwise operations, FMA off) and the same
first-in-C-order argmax tie-breaking; contraction sums may differ from BLAS
in the last ulp, so cross-backend value parity is checked at 1e-12 relative.
"""

from __future__ import annotations

import numpy as np


def pivot_update(T: np.ndarray, prow: int, pcol: int) -> None:
    """Gauss pivot on row `prow`, column `pcol`, in place, all rows of T."""
    piv = T[prow, pcol]
    T[prow] *= 1.0 / piv
    col = T[:, pcol].copy()
    col[prow] = 0.0
    T -= np.outer(col, T[prow])
    T[:, pcol] = 0.0
    T[prow, pcol] = 1.0


def multilinear_max(z: np.ndarray, V: np.ndarray):
    """Max of |<z, v_{i1} x ... x v_{id}>| over rows of V in every slot.

    Returns (value, index tuple).  First maximum in C-order wins, matching
    np.argmax tie-breaking.
    """
    d = z.ndim
    G = z
    for _ in range(d):
        # contract the current leading axis, append the vertex axis at the end
        G = np.tensordot(G, V, axes=([0], [1]))
    flat = np.abs(G.ravel())
    pos = int(np.argmax(flat))
    idx = np.unravel_index(pos, G.shape)
    return float(flat[pos]), tuple(int(i) for i in idx)
