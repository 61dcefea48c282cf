"""Base norms on R^n, their dual balls and grids on their unit spheres."""

from __future__ import annotations

from enum import Enum

import numpy as np

from .config import DEFAULTS, Settings
from .errors import DimensionTooLarge, UnsupportedNorm
from .rng import child_rng

# hard cap: 2^n sign vertices beyond this are never materialized
MAX_SIGN_DIM = 14


class BaseNorm(Enum):
    L1 = "l1"
    L2 = "l2"
    LINF = "linf"

    def dual(self) -> "BaseNorm":
        if self is BaseNorm.L1:
            return BaseNorm.LINF
        if self is BaseNorm.LINF:
            return BaseNorm.L1
        return BaseNorm.L2

    @property
    def is_polytope(self) -> bool:
        return self is not BaseNorm.L2


def vector_norm(x: np.ndarray, base: BaseNorm) -> float:
    x = np.asarray(x, dtype=float)
    if base is BaseNorm.L1:
        return float(np.sum(np.abs(x)))
    if base is BaseNorm.L2:
        return float(np.linalg.norm(x))
    return float(np.max(np.abs(x))) if x.size else 0.0


def ball_vertices(base: BaseNorm, n: int) -> np.ndarray:
    """Extreme points of the unit ball, one per row.

    L1 gives the 2n signed coordinate vectors, Linf the 2^n sign vectors
    (n <= 14).  L2 has no vertices; callers must use a different route.
    """
    if n < 1:
        raise ValueError("dimension must be positive")
    if base is BaseNorm.L1:
        eye = np.eye(n)
        return np.vstack([eye, -eye])
    if base is BaseNorm.LINF:
        if n > MAX_SIGN_DIM:
            raise DimensionTooLarge(f"2^{n} sign vertices exceed the cap (n <= {MAX_SIGN_DIM})")
        signs = np.array([[1.0, -1.0]] * n, dtype=float)
        grids = np.meshgrid(*signs, indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)
    raise UnsupportedNorm("the L2 ball is not a polytope; no vertex set exists")


def norming_functional(x: np.ndarray, base: BaseNorm) -> np.ndarray:
    """phi with dual norm 1 and <phi, x> = ||x||.  Deterministic tie-breaks."""
    x = np.asarray(x, dtype=float)
    n = x.size
    if not np.any(x):
        out = np.zeros(n)
        out[0] = 1.0
        return out
    if base is BaseNorm.L2:
        return x / np.linalg.norm(x)
    if base is BaseNorm.L1:
        # dual Linf ball: sign vector (zeros mapped to +1)
        s = np.sign(x)
        s[s == 0.0] = 1.0
        return s
    # Linf: dual L1 ball, signed coordinate at the first maximal entry
    j = int(np.argmax(np.abs(x)))
    out = np.zeros(n)
    out[j] = 1.0 if x[j] >= 0 else -1.0
    return out


def _fibonacci_sphere(count: int) -> np.ndarray:
    # classic golden-angle spiral on S^2
    i = np.arange(count, dtype=float) + 0.5
    z = 1.0 - 2.0 * i / count
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = np.pi * (1.0 + np.sqrt(5.0)) * i
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def unit_sphere_grid(n: int, count: int, seed: int = 0) -> np.ndarray:
    """Quasi-uniform points on the Euclidean unit sphere, deterministic."""
    if n == 1:
        return np.array([[1.0], [-1.0]])[: max(1, count)]
    if n == 2:
        theta = 2.0 * np.pi * np.arange(count) / count
        return np.stack([np.cos(theta), np.sin(theta)], axis=1)
    if n == 3:
        return _fibonacci_sphere(count)
    rng = child_rng(seed, 0x5F3_E, n, count)
    pts = rng.standard_normal((count, n))
    norms = np.linalg.norm(pts, axis=1)
    norms[norms == 0.0] = 1.0
    return pts / norms[:, None]


def base_sphere_grid(base: BaseNorm, n: int, count: int, seed: int = 0,
                     settings: Settings = DEFAULTS) -> np.ndarray:
    """Points on the base-norm unit sphere: renormalized Euclidean grid plus
    polytope vertices and signed coordinate vectors."""
    pts = [unit_sphere_grid(n, count, seed)]
    eye = np.eye(n)
    pts.append(np.vstack([eye, -eye]))
    if base.is_polytope and (base is BaseNorm.L1 or n <= MAX_SIGN_DIM):
        pts.append(ball_vertices(base, n))
    allpts = np.vstack(pts)
    if base is BaseNorm.L1:
        norms = np.sum(np.abs(allpts), axis=1)
    elif base is BaseNorm.L2:
        norms = np.linalg.norm(allpts, axis=1)
    else:
        norms = np.max(np.abs(allpts), axis=1)
    keep = norms > 1e-15
    return allpts[keep] / norms[keep, None]
