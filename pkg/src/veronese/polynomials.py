"""Homogeneous polynomial maps and their restriction to the power cone.

A degree-d polynomial map P : R^n -> R^m is stored as m symmetric coefficient
tensors, so the induced linear operator on symmetric tensors is literally the
stored data: apply_operator contracts coefficients against a tensor, and
eval_poly is the same contraction against x^{(x)d}.

poly_norm brackets sup ||P(x)|| over the base unit ball.  The Lipschitz
constant of the cone restriction equals that sup under the symmetric
projective metric, so its certified upper bound transfers; under the two
cross norms only the band up to 2^{d-1} d^d/d! transfers.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from . import bracket as br
from .balls import BaseNorm
from .bracket import Bracket
from .cone import ConeMetricSpace, cone_distance
from .config import DEFAULTS, Settings
from .errors import BudgetExhausted, DimensionMismatch, NotSymmetric
from .norms import NormSelector
from .polysup import SupResult, poly_eval_batch, poly_sup_bracket
from .rng import child_rng
from .tensors import ConePoint, symmetrize, symmetry_defect, veronese


@dataclass(frozen=True)
class HomPoly:
    """P(x)_j = <A_j, x^{(x)d}> with symmetric coefficient tensors A_j."""

    coeffs: np.ndarray  # (m,) + (n,)*d

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim < 2:
            raise DimensionMismatch("coefficients need shape (m,) + (n,)*d")
        if len(set(c.shape[1:])) != 1:
            raise DimensionMismatch("coefficient tensors must be hypercubes")
        for j in range(c.shape[0]):
            scale = max(float(np.max(np.abs(c[j]))), 1e-300)
            if symmetry_defect(c[j]) > 1e-12 * scale:
                raise NotSymmetric(f"coefficient tensor {j} is not symmetric")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.ndim - 1

    @property
    def dim(self) -> int:
        return int(self.coeffs.shape[1])

    @property
    def codim(self) -> int:
        return int(self.coeffs.shape[0])

    @staticmethod
    def from_tensors(tensors) -> "HomPoly":
        stacked = np.stack([symmetrize(np.asarray(t, dtype=float))
                            for t in tensors])
        return HomPoly(stacked)

    @staticmethod
    def random(n: int, d: int, m: int, seed: int) -> "HomPoly":
        rng = child_rng(seed, 0x9017, n, d, m)
        return HomPoly.from_tensors(rng.standard_normal((m,) + (n,) * d))

    def __call__(self, x) -> np.ndarray:
        return eval_poly(self, x)


def eval_poly(P: HomPoly, x) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    if x.size != P.dim:
        raise DimensionMismatch(f"expected dim {P.dim}, got {x.size}")
    return poly_eval_batch(P.coeffs, x[None, :])[0]


def apply_operator(P: HomPoly, u) -> np.ndarray:
    """The linear operator on degree-d tensors induced by P's coefficients."""
    u = np.asarray(u, dtype=float)
    if u.shape != P.coeffs.shape[1:]:
        raise DimensionMismatch("tensor shape mismatch with the coefficients")
    m = P.codim
    return P.coeffs.reshape(m, -1) @ u.ravel()


@dataclass(frozen=True)
class VOperator:
    """The cone restriction u = x^{(x)d} |-> P(x) of the induced operator."""

    poly: HomPoly

    def __call__(self, u) -> np.ndarray:
        if isinstance(u, ConePoint):
            return apply_operator(self.poly, u.realize())
        return apply_operator(self.poly, u)


def poly_norm(P: HomPoly, base: BaseNorm, cod: BaseNorm = BaseNorm.L2,
              settings: Settings = DEFAULTS, tol: float | None = None,
              strict: bool = True, seed: int = 0) -> Bracket:
    """Bracket for sup ||P(x)||_cod over the base unit ball.

    Raises BudgetExhausted carrying the best bracket when the relative gap
    target is not met and `strict` is set.
    """
    res = _poly_sup(P, base, cod, settings, tol, seed)
    target = settings.gap_target if tol is None else tol
    if strict and res.bracket.rel_gap > target:
        raise BudgetExhausted(
            f"poly norm gap {res.bracket.rel_gap:.3e} above {target:.3e}",
            best=res.bracket)
    return res.bracket


def _poly_sup(P: HomPoly, base, cod, settings, tol, seed) -> SupResult:
    return poly_sup_bracket(P.coeffs, base, cod, settings, seed,
                            gap_target=tol)


_LIP_BAND = {
    NormSelector.SYM_PROJECTIVE: lambda d: 1.0,
    NormSelector.INJECTIVE: lambda d: 2.0 ** (d - 1) * d ** d / factorial(d),
    NormSelector.PROJECTIVE: lambda d: 2.0 ** (d - 1) * d ** d / factorial(d),
}


def cone_lipschitz_constant(P: HomPoly, space: ConeMetricSpace,
                            cod: BaseNorm = BaseNorm.L2,
                            settings: Settings | None = None,
                            tol: float | None = None,
                            seed: int = 0) -> Bracket:
    """Lipschitz constant of the cone restriction of P under the space metric.

    Upper bound: the polynomial sup norm transfers exactly for the symmetric
    projective metric and up to 2^{d-1} d^d/d! for the cross norms.  Lower
    bound: best distance ratio over searched cone pairs; the pair (witness, 0)
    alone already attains the polynomial lower bound because elementary-tensor
    distances to the origin are powers of base norms.
    """
    settings = space.settings if settings is None else settings
    if P.dim != space.n or P.degree != space.d:
        raise DimensionMismatch("polynomial does not match the space")
    sup = _poly_sup(P, space.base, cod, settings, tol, seed)
    band = _LIP_BAND[space.selector](space.d)
    upper = band * sup.bracket.upper
    # stop searching once the bracket meets the requested gap; each probed
    # pair costs a full cone distance, which dominates at d >= 3
    gap = settings.gap_target if tol is None else tol
    lower = _pair_search_lower(P, space, cod, sup, settings, seed,
                               goal=upper / (1.0 + gap))
    lower = min(lower, upper)
    upper_tag = br.THEOREM if band == 1.0 else br.HOLDER
    return Bracket(lower, upper, br.PAIR_SEARCH, upper_tag)


def _ratio_lower(P: HomPoly, space: ConeMetricSpace, cod, x, y) -> float:
    """Certified ratio lower bound ||P(x)-P(y)|| / d_upper(x, y)."""
    if np.allclose(x, y):
        return 0.0
    num = _cod_norm(eval_poly(P, x) - eval_poly(P, y), cod)
    den = cone_distance(ConePoint(x, space.d), ConePoint(y, space.d),
                        space).upper
    if den <= 1e-300:
        return 0.0
    return num / den


def _cod_norm(v: np.ndarray, cod: BaseNorm) -> float:
    if cod is BaseNorm.L1:
        return float(np.sum(np.abs(v)))
    if cod is BaseNorm.L2:
        return float(np.linalg.norm(v))
    return float(np.max(np.abs(v)))


def _pair_search_lower(P, space, cod, sup: SupResult, settings: Settings,
                       seed: int, goal: float | None = None) -> float:
    n, d = space.n, space.d
    rng = child_rng(seed, 0x11FA, n, d)
    zero = np.zeros(n)
    best = _ratio_lower(P, space, cod, sup.witness, zero)
    if goal is not None and best >= goal:
        return best
    restarts = max(4, settings.pair_restarts // 8)
    for r in range(restarts):
        x = rng.standard_normal(n)
        y = zero if r % 2 == 0 else rng.standard_normal(n)
        val = _ratio_lower(P, space, cod, x, y)
        step = 0.5
        for _ in range(24):
            moved = False
            for _ in range(2):
                dx = step * rng.standard_normal(n)
                dy = step * rng.standard_normal(n) if r % 2 else np.zeros(n)
                cand = _ratio_lower(P, space, cod, x + dx, y + dy)
                if cand > val * (1.0 + 1e-12):
                    x, y, val = x + dx, y + dy, cand
                    moved = True
            if not moved:
                step *= 0.5
                if step < 1e-6:
                    break
        if val > best:
            best = val
            if goal is not None and best >= goal:
                return best
    return best


@dataclass(frozen=True)
class FactorizationReport:
    samples: int
    max_residual: float
    tolerance: float
    passed: bool


def factorization_check(P: HomPoly, samples: int = 100,
                        seed: int = 0) -> FactorizationReport:
    """eval_poly must agree with apply_operator on d-th powers: the diagram
    P = T_P o (power map) commutes by construction; this checks the wiring."""
    rng = child_rng(seed, 0xFAC7, P.dim, P.degree)
    worst = 0.0
    for _ in range(samples):
        x = rng.standard_normal(P.dim)
        lhs = eval_poly(P, x)
        rhs = apply_operator(P, veronese(x, P.degree))
        scale = max(float(np.max(np.abs(lhs))), 1.0)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))) / scale)
    tol = 1e-10
    return FactorizationReport(samples, worst, tol, worst <= tol)
