"""Dense order-d tensors on R^n, symmetric tensors and cone points.

Tensors are numpy float64 arrays of shape (n,)*d in row-major order.  The
public wrapper types validate shape and (for SymTensor) symmetry; the module
functions accept and return bare arrays so the numerics stay composable.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from math import factorial

import numpy as np

from .balls import BaseNorm, vector_norm
from .errors import DimensionMismatch, NotCauchy, NotSymmetric

SYM_TOL = 1e-12


def as_tensor(data, d: int | None = None, n: int | None = None) -> np.ndarray:
    t = np.ascontiguousarray(np.asarray(data, dtype=float))
    if t.ndim == 0:
        raise DimensionMismatch("tensors must have order >= 1")
    if len(set(t.shape)) != 1:
        raise DimensionMismatch(f"tensor axes must share one dimension, got {t.shape}")
    if d is not None and t.ndim != d:
        raise DimensionMismatch(f"expected order {d}, got {t.ndim}")
    if n is not None and t.shape[0] != n:
        raise DimensionMismatch(f"expected dimension {n}, got {t.shape[0]}")
    return t


def symmetry_defect(t: np.ndarray) -> float:
    """Max deviation under adjacent axis swaps (generators of all permutations)."""
    d = t.ndim
    worst = 0.0
    for i in range(d - 1):
        axes = list(range(d))
        axes[i], axes[i + 1] = axes[i + 1], axes[i]
        worst = max(worst, float(np.max(np.abs(t - np.transpose(t, axes)), initial=0.0)))
    return worst


@dataclass(frozen=True)
class DenseTensor:
    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "data", as_tensor(self.data))

    @property
    def order(self) -> int:
        return self.data.ndim

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def ravel(self) -> np.ndarray:
        return self.data.ravel()


@dataclass(frozen=True)
class SymTensor(DenseTensor):
    def __post_init__(self):
        super().__post_init__()
        scale = float(np.max(np.abs(self.data), initial=0.0))
        if symmetry_defect(self.data) > SYM_TOL * max(1.0, scale):
            raise NotSymmetric("tensor is not symmetric within 1e-12")


@dataclass(frozen=True)
class ConePoint:
    """d-th tensor power of a base vector, stored lazily as (vector, degree)."""

    x: np.ndarray
    degree: int

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float).ravel())
        if self.degree < 1:
            raise DimensionMismatch("degree must be >= 1")

    @property
    def dim(self) -> int:
        return self.x.size

    def realize(self) -> np.ndarray:
        return veronese(self.x, self.degree)

    def base_norm(self, base: BaseNorm) -> float:
        return vector_norm(self.x, base)


@dataclass(frozen=True)
class SymmetricDecomposition:
    """u = sum_k coeff_k * v_k^{x d} with unit-normalized directions v_k.

    Signs live in the coefficients; cost(base) = sum |coeff_k| * ||v_k||^d is
    the decomposition's contribution to the symmetric projective norm.
    """

    coeffs: np.ndarray
    vectors: np.ndarray  # (k, n)
    degree: int

    def reconstruct(self) -> np.ndarray:
        n = self.vectors.shape[1]
        out = np.zeros((n,) * self.degree)
        for lam, v in zip(self.coeffs, self.vectors):
            out += lam * veronese(v, self.degree)
        return out

    def cost(self, base: BaseNorm) -> float:
        return float(
            sum(abs(lam) * vector_norm(v, base) ** self.degree
                for lam, v in zip(self.coeffs, self.vectors))
        )


def veronese(x, d: int) -> np.ndarray:
    """d-th tensor power x (x) ... (x) x as a dense array."""
    x = np.asarray(x, dtype=float).ravel()
    if d < 1:
        raise DimensionMismatch("degree must be >= 1")
    out = x
    for _ in range(d - 1):
        out = np.multiply.outer(out, x)
    return np.ascontiguousarray(out)


def symmetrize(t) -> np.ndarray:
    """Average of t over all axis permutations."""
    t = as_tensor(t)
    d = t.ndim
    if d == 1:
        return t.copy()
    acc = np.zeros_like(t)
    for perm in permutations(range(d)):
        acc += np.transpose(t, perm)
    return acc / factorial(d)


def apply_functionals(t, phis) -> float:
    """Pair t with phi_1 (x) ... (x) phi_d by contracting one slot at a time."""
    t = as_tensor(t)
    if len(phis) != t.ndim:
        raise DimensionMismatch(f"need {t.ndim} functionals, got {len(phis)}")
    out = t
    for phi in phis:
        phi = np.asarray(phi, dtype=float).ravel()
        if phi.size != t.shape[0]:
            raise DimensionMismatch("functional dimension mismatch")
        out = np.tensordot(out, phi, axes=([0], [0]))
    return float(out)


def same_cone_point(x, y, d: int, tol: float = 1e-9) -> bool:
    """Whether x^{x d} == y^{x d}: x == y for odd d, x == +-y for even d."""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size != y.size:
        raise DimensionMismatch("vectors live in different dimensions")
    if d % 2 == 1:
        return bool(np.linalg.norm(x - y) <= tol)
    return bool(min(np.linalg.norm(x - y), np.linalg.norm(x + y)) <= tol)


@dataclass(frozen=True)
class ConeLimit:
    indices: tuple[int, ...]
    signs: tuple[int, ...]
    limit: np.ndarray


def cone_sequence_limit(xs, d: int, tol: float = 1e-6) -> ConeLimit:
    """Recover the vector limit of a convergent tensor-power sequence.

    The Cauchy check uses the coefficient l1 distance (the exact projective
    norm for the L1 base).  A settled tail must contain at least two terms;
    otherwise NotCauchy is raised.  For even d the recovered limit is
    sign-canonicalized (largest-magnitude coordinate made positive).
    """
    xs = [np.asarray(x, dtype=float).ravel() for x in xs]
    if len(xs) < 2:
        raise NotCauchy("need at least two terms")
    ts = [veronese(x, d).ravel() for x in xs]
    k = len(ts)

    start = None
    for K in range(0, k - 1):
        tail = ts[K:]
        diam = max(
            float(np.sum(np.abs(tail[i] - tail[j])))
            for i in range(len(tail)) for j in range(i + 1, len(tail))
        )
        if diam <= tol:
            start = K
            break
    if start is None:
        raise NotCauchy(f"no settled tail of length >= 2 at tolerance {tol}")

    indices = tuple(range(start, k))
    if float(np.sum(np.abs(ts[-1]))) <= tol:
        # zero tensor limit forces the vectors themselves to vanish
        zero = np.zeros_like(xs[0])
        return ConeLimit(indices, tuple(1 for _ in indices), zero)

    ref = xs[-1]
    signs = []
    for i in indices:
        if d % 2 == 0:
            s = 1 if np.linalg.norm(xs[i] - ref) <= np.linalg.norm(xs[i] + ref) else -1
        else:
            s = 1
        signs.append(s)
    limit = ref.copy()
    if d % 2 == 0:
        j = int(np.argmax(np.abs(limit)))
        if limit[j] < 0:
            limit = -limit
            signs = [-s for s in signs]
    return ConeLimit(indices, tuple(signs), limit)


def sym_rep_indices(n: int, d: int):
    """Representative multi-indices of symmetric order-d tensors on R^n.

    Returns (reps, mults): sorted index tuples (i1 <= ... <= id) and the
    number of distinct permutations of each, so a symmetric tensor is
    determined by its values at `reps` and full l1 mass is mults * |values|.
    """
    from itertools import combinations_with_replacement
    from math import factorial

    reps = list(combinations_with_replacement(range(n), d))
    mults = np.empty(len(reps))
    for k, idx in enumerate(reps):
        counts = {}
        for i in idx:
            counts[i] = counts.get(i, 0) + 1
        m = factorial(d)
        for c in counts.values():
            m //= factorial(c)
        mults[k] = m
    return reps, mults


def sym_reduce(t: np.ndarray, reps) -> np.ndarray:
    """Representative entries of a symmetric tensor."""
    flat = np.asarray(t, dtype=float)
    return np.array([flat[idx] for idx in reps])


def sym_expand(values: np.ndarray, reps, n: int, d: int) -> np.ndarray:
    """Symmetric tensor with the given representative entries."""
    from itertools import permutations

    out = np.zeros((n,) * d)
    for val, idx in zip(values, reps):
        for p in set(permutations(idx)):
            out[p] = val
    return out
