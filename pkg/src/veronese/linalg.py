"""Thin dense linear algebra layer: SVD, symmetric eigen, power iteration.

The factorizations delegate to LAPACK through numpy; the power iteration is an
independent slow route kept for cross-checks.
"""

from __future__ import annotations

import numpy as np

from .errors import NumericalFailure


def svd(a: np.ndarray):
    """Full SVD (U, s, Vt) with s sorted descending, checked for reconstruction."""
    a = np.asarray(a, dtype=float)
    u, s, vt = np.linalg.svd(a, full_matrices=True)
    k = s.size
    resid = u[:, :k] @ (s[:, None] * vt[:k]) - a
    scale = s[0] if k and s[0] > 0 else 1.0
    if np.max(np.abs(resid)) > 1e-10 * max(1.0, scale):
        raise NumericalFailure("svd reconstruction residual above 1e-10 * sigma_max")
    return u, s, vt


def singular_values(a: np.ndarray) -> np.ndarray:
    return svd(a)[1]


def spectral_norm(a: np.ndarray) -> float:
    s = np.linalg.svd(np.asarray(a, dtype=float), compute_uv=False)
    return float(s[0]) if s.size else 0.0


def nuclear_norm(a: np.ndarray) -> float:
    s = np.linalg.svd(np.asarray(a, dtype=float), compute_uv=False)
    return float(np.sum(s))


def sym_eig(a: np.ndarray):
    """Eigendecomposition of a symmetric matrix, eigenvalues descending by |.|."""
    a = np.asarray(a, dtype=float)
    if a.shape[0] != a.shape[1] or np.max(np.abs(a - a.T), initial=0.0) > 1e-10 * max(
        1.0, float(np.max(np.abs(a), initial=0.0))
    ):
        raise ValueError("sym_eig needs a symmetric square matrix")
    w, v = np.linalg.eigh(0.5 * (a + a.T))
    order = np.argsort(-np.abs(w), kind="stable")
    return w[order], v[:, order]


def power_iteration(a: np.ndarray, iters: int = 500, tol: float = 1e-12, seed: int = 7):
    """Dominant singular value of `a` by alternating power steps.

    Slow independent route used to cross-check the LAPACK SVD.
    """
    a = np.asarray(a, dtype=float)
    m, n = a.shape
    rng = np.random.Generator(np.random.PCG64(seed))
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    sigma = 0.0
    for _ in range(iters):
        u = a @ v
        nu = np.linalg.norm(u)
        if nu == 0.0:
            return 0.0
        u /= nu
        v = a.T @ u
        nv = np.linalg.norm(v)
        if nv == 0.0:
            return 0.0
        v /= nv
        if abs(nv - sigma) <= tol * max(1.0, nv):
            return float(nv)
        sigma = nv
    return float(sigma)
