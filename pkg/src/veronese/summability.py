"""Summing constants for polynomial maps restricted to the power cone.

Two denominators compete under a family of point pairs.  One takes the
supremum over all polynomials with certified sup norm at most one; the other
over all 1-Lipschitz functions on the cone pinned to zero at the origin.
Norm-one polynomials are 1-Lipschitz for the symmetric projective metric, so
the Lipschitz denominator dominates the polynomial one pairwise, and the two
summing ratios sandwich each other family by family.

At exponent one both denominators reduce exactly: the polynomial side to a
sign-pattern sweep of symmetric projective norms, the Lipschitz side to one
small LP per sign pattern over the metric polytope of the touched points.
For larger exponents the maxima of these convex objectives sit at polytope
vertices, enumerated exactly while the family touches few enough distinct
points; past that cap the routines fall back to certified sandwich bounds
(ascent lower, power-sum upper).

Every finite family only ever certifies a lower bound for the best summing
constant, so constant estimates report the witness family and search budget
alongside the value.

The Pietsch side goes the other way: given a candidate constant, a small LP
over sampled norm-one functionals recovers a discrete dominating measure,
which then splits the map through a reweighted max-to-q-mean inclusion with
an explicit Lipschitz extension on the outer leg.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from . import bracket as br
from .balls import BaseNorm, ball_vertices, norming_functional, vector_norm
from .bracket import Bracket
from .cone import ConeMetricSpace, cone_distance
from .config import DEFAULTS, Settings, thread_cap
from .errors import (BudgetExhausted, DegenerateFamily, DimensionMismatch,
                     FamilyTooLarge, LipschitzExceeded, NotLipschitzOnS,
                     NumericalFailure, PietschInfeasible)
from .linprog import LPProblem, LPStatus, lp_solve
from .norms import sym_projective_norm
from .polynomials import HomPoly, eval_poly
from .polysup import poly_sup_bracket
from .rng import child_rng
from .tensors import ConePoint, same_cone_point, symmetrize, veronese


class SummingMode(Enum):
    POLY = "poly"
    LIP = "lip"


@dataclass(frozen=True)
class PairFamily:
    """Finite family of vector pairs sharing one ambient dimension."""

    X: np.ndarray  # (k, n)
    Y: np.ndarray  # (k, n)

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.X, dtype=float))
        Y = np.atleast_2d(np.asarray(self.Y, dtype=float))
        if X.shape != Y.shape or X.ndim != 2 or X.shape[0] < 1:
            raise DimensionMismatch("need matching (k, n) point arrays, k >= 1")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)

    @property
    def k(self) -> int:
        return int(self.X.shape[0])

    @property
    def dim(self) -> int:
        return int(self.X.shape[1])

    @staticmethod
    def from_pairs(pairs) -> "PairFamily":
        xs, ys = zip(*pairs)
        return PairFamily(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float))

    def __iter__(self):
        return zip(self.X, self.Y)

    def swapped(self, i: int) -> "PairFamily":
        X, Y = self.X.copy(), self.Y.copy()
        X[i], Y[i] = self.Y[i], self.X[i]
        return PairFamily(X, Y)

    def reordered(self, perm) -> "PairFamily":
        perm = np.asarray(perm, dtype=int)
        return PairFamily(self.X[perm], self.Y[perm])

    def with_pair(self, x, y) -> "PairFamily":
        return PairFamily(np.vstack([self.X, np.asarray(x, dtype=float)]),
                          np.vstack([self.Y, np.asarray(y, dtype=float)]))


def _as_family(family) -> PairFamily:
    if isinstance(family, PairFamily):
        return family
    return PairFamily.from_pairs([(np.asarray(u, dtype=float).ravel(),
                                   np.asarray(v, dtype=float).ravel())
                                  for u, v in family])


def _sign_patterns(k: int):
    """Sign vectors with the first entry pinned to +1 (global flips cancel)."""
    for tail in itertools.product((1.0, -1.0), repeat=k - 1):
        yield np.asarray((1.0,) + tail)


def _map_patterns(fn, patterns):
    workers = thread_cap()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, patterns))
    return [fn(p) for p in patterns]


# ---------------------------------------------------------------------------
# polynomial-ball denominator


def poly_denominator(family, d: int, base: BaseNorm, q: float = 1.0,
                     settings: Settings = DEFAULTS, tol: float | None = None,
                     seed: int = 0) -> Bracket:
    """sup of sum |p(x_i) - p(y_i)|^q over certified norm-one polynomials.

    q = 1 reduces exactly to a sign-pattern sweep of symmetric projective
    norms of the power differences.  For q > 1 the maximum of this convex
    functional is bracketed: closed forms where the ball has tractable
    extreme points (degree 1; quadratics under L2 for n <= 3), otherwise
    ascent over feasible polynomials against power-sum upper bounds.
    """
    fam = _as_family(family)
    if q < 1.0:
        raise ValueError("exponent must be >= 1")
    if fam.k > settings.family_cap:
        raise FamilyTooLarge(
            f"family of size {fam.k} exceeds the cap {settings.family_cap}")
    deltas = np.stack([veronese(x, d) - veronese(y, d) for x, y in fam])
    scale = float(np.max(np.abs(deltas)))
    if scale < 1e-14:
        return br.point(0.0, br.EXACT_CLOSED)
    if d == 1:
        return _poly_den_linear(deltas, base, q, settings, seed)
    hints = np.vstack([fam.X, fam.Y])
    if q == 1.0:
        return _poly_den_sweep(deltas, base, settings, hints, tol, seed)
    if d == 2 and base is BaseNorm.L2 and fam.dim <= 3 and q == 2.0:
        return _poly_den_square_l2(deltas, settings, seed)
    return _poly_den_ascent(fam, deltas, base, q, settings, hints, tol, seed)


def _poly_den_sweep(deltas, base, settings, hints, tol, seed) -> Bracket:
    k = deltas.shape[0]

    def job(sigma):
        comb = np.tensordot(sigma, deltas, axes=(0, 0))
        res = sym_projective_norm(comb, base, settings, hints=hints,
                                  tol=tol, strict=False, seed=seed)
        return res.bracket

    results = _map_patterns(job, list(_sign_patterns(k)))
    lo = max(results, key=lambda b: b.lower)
    hi = max(results, key=lambda b: b.upper)
    return Bracket(lo.lower, hi.upper,
                   f"{br.EXACT_SIGN_ENUM}:{lo.lower_method}",
                   f"{br.EXACT_SIGN_ENUM}:{hi.upper_method}")


def _poly_den_linear(deltas, base, q, settings, seed) -> Bracket:
    """Degree 1: the polynomial ball is the dual-norm ball."""
    k, n = deltas.shape
    if q == 1.0:
        best = 0.0
        for sigma in _sign_patterns(k):
            best = max(best, vector_norm(sigma @ deltas, base))
        return br.point(best, br.EXACT_SIGN_ENUM)
    dual = base.dual()
    if dual.is_polytope and (dual is BaseNorm.L1 or n <= 12):
        V = ball_vertices(dual, n)
        vals = np.sum(np.abs(V @ deltas.T) ** q, axis=1)
        return br.point(float(np.max(vals)), br.EXACT_ENUM)
    if q == 2.0:  # L2 base: top eigenvalue of the pair Gram
        w = np.linalg.eigvalsh(deltas.T @ deltas)
        return br.point(float(max(w[-1], 0.0)), br.EXACT_EIG)
    # L2 base, other exponents: sphere ascent against power-sum uppers
    rng = child_rng(seed, 0x51A7, k, n)
    best = 0.0
    for r in range(max(8, settings.restarts // 4)):
        a = rng.standard_normal(n)
        a /= np.linalg.norm(a)
        for _ in range(60):
            v = deltas @ a
            g = deltas.T @ (q * np.abs(v) ** (q - 1.0) * np.sign(v))
            ng = np.linalg.norm(g)
            if ng < 1e-14:
                break
            a_new = a + 0.3 * g / ng
            a_new /= np.linalg.norm(a_new)
            if np.allclose(a_new, a):
                break
            a = a_new
        best = max(best, float(np.sum(np.abs(deltas @ a) ** q)))
    den1 = max(float(vector_norm(s @ deltas, base)) for s in _sign_patterns(k))
    singles = np.asarray([vector_norm(dl, base) for dl in deltas])
    upper = _power_sum_upper(den1, singles, q)
    return Bracket(min(best, upper), upper, br.ASCENT, br.HOLDER)


def _power_sum_upper(den1_upper: float, singles_upper: np.ndarray,
                     q: float) -> float:
    """Certified uppers for sum a_i^q given sum a_i <= den1, a_i <= d_i."""
    top = float(np.max(singles_upper, initial=0.0))
    return min(den1_upper ** q,
               float(np.sum(singles_upper ** q)),
               top ** (q - 1.0) * den1_upper)


def _poly_den_square_l2(deltas, settings, seed) -> Bracket:
    """Quadratics under L2, q = 2, n <= 3.

    Extreme points of the spectral unit ball of symmetric matrices have all
    eigenvalues +-1; up to global sign those are the identity and the
    reflections I - 2vv^T.  The reflection values form one homogeneous
    quartic in v, certified by the branch-and-bound sup routine.
    """
    k, n = deltas.shape[0], deltas.shape[1]
    traces = np.trace(deltas, axis1=1, axis2=2)
    at_identity = float(np.sum(traces ** 2))
    B = traces[:, None, None] * np.eye(n)[None] - 2.0 * deltas
    quartic = symmetrize(np.einsum("kab,kcd->abcd", B, B))
    res = poly_sup_bracket(quartic[None], BaseNorm.L2, settings=settings,
                           seed=seed, gap_target=settings.gap_target)
    lo = max(at_identity, res.bracket.lower)
    hi = max(at_identity, res.bracket.upper)
    return Bracket(lo, hi, br.EXACT_CLOSED if lo == at_identity else
                   res.bracket.lower_method, br.EXACT_CLOSED
                   if hi == at_identity else res.bracket.upper_method)


def _poly_den_ascent(fam, deltas, base, q, settings, hints, tol, seed) -> Bracket:
    """Generic q > 1: feasible-polynomial ascent against power-sum uppers."""
    d = deltas.ndim - 1
    n = fam.dim
    loose = settings.with_(gap_target=max(settings.gap_target, 2e-2))
    singles = [sym_projective_norm(dl, base, loose, hints=hints,
                                   tol=2e-2, strict=False, seed=seed).bracket
               for dl in deltas]
    den1 = _poly_den_sweep(deltas, base, loose, hints, tol, seed)
    upper = _power_sum_upper(den1.upper,
                             np.asarray([s.upper for s in singles]), q)

    flat = deltas.reshape(deltas.shape[0], -1)

    def value(coeffs: np.ndarray) -> float:
        sup = poly_sup_bracket(coeffs[None], base, settings=loose, seed=seed,
                               gap_target=5e-2).bracket.upper
        if sup < 1e-12:
            return 0.0
        v = flat @ coeffs.ravel() / sup
        return float(np.sum(np.abs(v) ** q))

    best_val = max(max(s.lower, 0.0) ** q for s in singles)
    best_A = None
    cands = []
    for z in np.vstack([fam.X, fam.Y]):
        if np.linalg.norm(z) > 1e-12:
            phi = norming_functional(z, base)
            cands.append(veronese(phi, d))
    rng = child_rng(seed, 0xA5CE, n, d)
    for _ in range(6):
        cands.append(symmetrize(rng.standard_normal((n,) * d)))
    for A in cands:
        val = value(A)
        if val > best_val:
            best_val, best_A = val, A
    if best_A is not None:
        A, step = best_A, 0.5
        for _ in range(12):
            v = flat @ A.ravel()
            g = np.tensordot(q * np.abs(v) ** (q - 1.0) * np.sign(v), deltas,
                             axes=(0, 0))
            ng = float(np.linalg.norm(g))
            if ng < 1e-14:
                break
            cand = A + step * float(np.linalg.norm(A)) / ng * g
            val = value(cand)
            if val > best_val * (1.0 + 1e-10):
                best_val, A = val, cand
            else:
                step *= 0.5
                if step < 1e-3:
                    break
    return Bracket(min(best_val, upper), upper, br.ASCENT, br.HOLDER)


# ---------------------------------------------------------------------------
# Lipschitz-dual denominator


def _distinct_cone_points(X, Y, d: int):
    """Origin-rooted distinct point list plus pair index maps."""
    points = [np.zeros(X.shape[1])]

    def locate(z):
        for idx, p in enumerate(points):
            if same_cone_point(z, p, d, tol=1e-9 * (1.0 + np.linalg.norm(z))):
                return idx
        points.append(z)
        return len(points) - 1

    iu = np.asarray([locate(x) for x in X], dtype=int)
    iv = np.asarray([locate(y) for y in Y], dtype=int)
    return np.asarray(points), iu, iv


def _metric_closure(R: np.ndarray) -> np.ndarray:
    R = R.copy()
    for t in range(R.shape[0]):
        np.minimum(R, R[:, t:t + 1] + R[t:t + 1, :], out=R)
    return R


def _pair_matrix(iu, iv, M: int) -> np.ndarray:
    D = np.zeros((iu.size, M - 1))
    for i, (p, qq) in enumerate(zip(iu, iv)):
        if p > 0:
            D[i, p - 1] += 1.0
        if qq > 0:
            D[i, qq - 1] -= 1.0
    return D


def _lp_max_linear(R: np.ndarray, c: np.ndarray, settings: Settings):
    """max c.h over {|h_p - h_q| <= R_pq, h_0 = 0}; returns (value, h)."""
    M = R.shape[0]
    F = M - 1
    if F == 0 or not np.any(c):
        return 0.0, np.zeros(F)
    pairs = list(itertools.combinations(range(1, M), 2))
    if not pairs:  # one free value, box constraint only
        return float(np.abs(c[0]) * R[1, 0]), np.sign(c[:1]) * R[1:, 0]
    nv = F + len(pairs)
    A = np.zeros((len(pairs), nv))
    b = np.zeros(len(pairs))
    for row, (p, qq) in enumerate(pairs):
        A[row, p - 1] = 1.0
        A[row, qq - 1] = -1.0
        A[row, F + row] = 1.0
        b[row] = R[p, qq]
    lb = np.concatenate([-R[1:, 0], np.zeros(len(pairs))])
    ub = np.concatenate([R[1:, 0], 2.0 * b])
    obj = np.concatenate([-c, np.zeros(len(pairs))])
    sol = lp_solve(LPProblem.build(obj, A, b, lb, ub), settings)
    if sol.status is not LPStatus.OPTIMAL:
        raise NumericalFailure(f"metric-polytope LP ended {sol.status.value}")
    h = sol.x[:F]
    return float(c @ h), h


def _lip_sweep(R, Dmat, settings):
    """Exponent-one sweep: one LP per sign pattern.  Returns (value, best h)."""
    k = Dmat.shape[0]

    def job(sigma):
        return _lp_max_linear(R, sigma @ Dmat, settings)

    results = _map_patterns(job, list(_sign_patterns(k)))
    vals = [v for v, _ in results]
    j = int(np.argmax(vals))
    return vals[j], results[j][1]


def _polytope_constraints(R: np.ndarray):
    """Rows (a, r) with the polytope equal to {|a.h| <= r}, h in R^{M-1}."""
    M = R.shape[0]
    F = M - 1
    rows, radii = [], []
    for p in range(1, M):
        e = np.zeros(F)
        e[p - 1] = 1.0
        rows.append(e)
        radii.append(R[p, 0])
    for p, qq in itertools.combinations(range(1, M), 2):
        e = np.zeros(F)
        e[p - 1] = 1.0
        e[qq - 1] = -1.0
        rows.append(e)
        radii.append(R[p, qq])
    return np.asarray(rows), np.asarray(radii)


def _enum_polytope_max(R, Dmat, q, settings: Settings):
    """Exact max of sum |Dmat h|^q over the metric polytope via its vertices.

    Vertices solve F linearly independent tight constraints; every subset and
    sign assignment is tried (batched), infeasible solutions filtered.  The
    objective is convex, so the vertex maximum is the polytope maximum.
    Returns None when the subset count exceeds the enumeration budget.
    """
    A_all, r_all = _polytope_constraints(R)
    C, F = A_all.shape
    if F == 0:
        return 0.0
    n_signs = 1 << max(F - 1, 0)
    if math.comb(C, F) * n_signs > settings.enum_budget:
        return None
    signs = np.asarray([(1.0,) + tail for tail in
                        itertools.product((1.0, -1.0), repeat=F - 1)])
    tol = 1e-9 * (1.0 + float(np.max(r_all, initial=0.0)))
    best = 0.0
    combos = list(itertools.combinations(range(C), F))
    chunk = 2048
    for start in range(0, len(combos), chunk):
        idx = np.asarray(combos[start:start + chunk])
        Ab = A_all[idx]                                   # (B, F, F)
        rb = r_all[idx]                                   # (B, F)
        dets = np.abs(np.linalg.det(Ab))
        keep = dets > 1e-10
        if not np.any(keep):
            continue
        Ab, rb = Ab[keep], rb[keep]
        rhs = rb[:, :, None] * signs.T[None, :, :]        # (B, F, S)
        try:
            H = np.linalg.solve(Ab, rhs)
        except np.linalg.LinAlgError:
            H = np.stack([_solve_or_skip(Ab[j], rhs[j]) for j in range(len(Ab))])
        Hf = H.transpose(0, 2, 1).reshape(-1, F)
        feas = np.all(np.abs(Hf @ A_all.T) <= r_all[None, :] + tol, axis=1)
        if not np.any(feas):
            continue
        vals = np.sum(np.abs(Hf[feas] @ Dmat.T) ** q, axis=1)
        best = max(best, float(np.max(vals)))
    return best


def _solve_or_skip(A, B):
    try:
        return np.linalg.solve(A, B)
    except np.linalg.LinAlgError:
        return np.full(B.shape, np.nan)


def _lip_ascent(R, Dmat, q, h0, settings):
    """Convex-max ascent: repeatedly jump to the LP maximizer of the tangent."""
    h = h0.copy()

    def value(hh):
        return float(np.sum(np.abs(Dmat @ hh) ** q))

    best = value(h)
    for _ in range(30):
        v = Dmat @ h
        g = Dmat.T @ (q * np.abs(v) ** (q - 1.0) * np.sign(v))
        if float(np.linalg.norm(g)) < 1e-14:
            break
        _, h_new = _lp_max_linear(R, g, settings)
        new = value(h_new)
        if new <= best * (1.0 + 1e-12):
            break
        best, h = new, h_new
    return best


def lip_denominator(pairs, space: ConeMetricSpace, q: float = 1.0,
                    settings: Settings | None = None, seed: int = 0) -> Bracket:
    """sup of sum |h(u_i) - h(v_i)|^q over 1-Lipschitz h vanishing at 0.

    Values of h at the finitely many touched points are the only unknowns:
    any assignment obeying the pairwise distance constraints extends to the
    whole cone with the same constant, so the feasible set is the metric
    polytope of the touched points (origin pinned).  Distance brackets enter
    as inner and outer radii, keeping both sides certified.
    """
    settings = space.settings if settings is None else settings
    if q < 1.0:
        raise ValueError("exponent must be >= 1")
    fam = _coerce_pairs(pairs, space)
    if fam.k > settings.family_cap:
        raise FamilyTooLarge(
            f"family of size {fam.k} exceeds the cap {settings.family_cap}")
    points, iu, iv = _distinct_cone_points(fam.X, fam.Y, space.d)
    M = len(points)
    if M == 1:
        return br.point(0.0, br.EXACT_CLOSED)
    Rl = np.zeros((M, M))
    Ru = np.zeros((M, M))
    dist = {}
    for p in range(M):
        for qq in range(p + 1, M):
            b = cone_distance(ConePoint(points[p], space.d),
                              ConePoint(points[qq], space.d), space)
            dist[(p, qq)] = b
            Rl[p, qq] = Rl[qq, p] = b.lower
            Ru[p, qq] = Ru[qq, p] = b.upper
    # closing the outer radii tightens the polytope without losing any truly
    # 1-Lipschitz assignment; the inner radii stay raw (closure could drop
    # below the true distances and shrink the certified-lower polytope)
    Ru = _metric_closure(Ru)
    exact_radii = bool(np.all(Ru - Rl <= 1e-12 * (1.0 + Ru)))
    Dmat = _pair_matrix(iu, iv, M)

    if q == 1.0:
        up, _ = _lip_sweep(Ru, Dmat, settings)
        lo = up if exact_radii else _lip_sweep(Rl, Dmat, settings)[0]
        tags = ((br.EXACT_VERTEX, br.EXACT_VERTEX) if exact_radii
                else (br.LP_PRIMAL, br.LP_DUAL))
        return Bracket(min(lo, up), up, *tags)

    if M <= settings.exact_poly_points:
        up = _enum_polytope_max(Ru, Dmat, q, settings)
        if up is not None:
            lo = up if exact_radii else _enum_polytope_max(Rl, Dmat, q, settings)
            tags = ((br.EXACT_VERTEX, br.EXACT_VERTEX) if exact_radii
                    else (br.LP_PRIMAL, br.LP_DUAL))
            return Bracket(min(lo, up), up, *tags)

    den1_up, _ = _lip_sweep(Ru, Dmat, settings)
    _, h_seed = _lip_sweep(Rl, Dmat, settings)
    lo = _lip_ascent(Rl, Dmat, q, h_seed, settings)
    singles = np.asarray([dist[(min(p, qq), max(p, qq))].upper if p != qq
                          else 0.0 for p, qq in zip(iu, iv)])
    upper = _power_sum_upper(den1_up, singles, q)
    return Bracket(min(lo, upper), upper, br.ASCENT, br.HOLDER)


def _coerce_pairs(pairs, space: ConeMetricSpace) -> PairFamily:
    if isinstance(pairs, PairFamily):
        fam = pairs
    else:
        xs, ys = [], []
        for u, v in pairs:
            for z, out in ((u, xs), (v, ys)):
                if isinstance(z, ConePoint):
                    if z.degree != space.d:
                        raise DimensionMismatch("cone point degree mismatch")
                    out.append(z.x)
                else:
                    out.append(np.asarray(z, dtype=float).ravel())
        fam = PairFamily(np.asarray(xs), np.asarray(ys))
    if fam.dim != space.n:
        raise DimensionMismatch("family dimension does not match the space")
    return fam


# ---------------------------------------------------------------------------
# ratios and constant estimation


def pair_increments(target, family: PairFamily, cod: BaseNorm) -> np.ndarray:
    """Codomain norms of the map increments along the family, exactly."""
    out = np.empty(family.k)
    for i, (x, y) in enumerate(family):
        fx = _apply_target(target, x)
        fy = _apply_target(target, y)
        out[i] = vector_norm(np.atleast_1d(fx - fy), cod)
    return out


def _apply_target(target, x) -> np.ndarray:
    if isinstance(target, HomPoly):
        return eval_poly(target, x)
    return np.atleast_1d(np.asarray(target(x), dtype=float))


def summing_ratio(P, family, q: float, mode: SummingMode,
                  space: ConeMetricSpace, cod: BaseNorm = BaseNorm.L2,
                  settings: Settings | None = None, tol: float | None = None,
                  seed: int = 0) -> Bracket:
    """(sum ||P(x_i)-P(y_i)||^q / denominator)^(1/q) for the chosen mode."""
    settings = space.settings if settings is None else settings
    fam = _as_family(family)
    num = float(np.sum(pair_increments(P, fam, cod) ** q))
    if mode is SummingMode.POLY:
        den = poly_denominator(fam, space.d, space.base, q, settings,
                               tol=tol, seed=seed)
    else:
        den = lip_denominator(fam, space, q, settings, seed=seed)
    if den.upper < 1e-12:
        raise DegenerateFamily(
            f"denominator upper bound {den.upper:.3e} is numerically zero")
    lo = (num / den.upper) ** (1.0 / q) if num > 0.0 else 0.0
    if den.lower > 0.0:
        hi = (num / den.lower) ** (1.0 / q)
    else:
        hi = np.inf
    return Bracket(lo, hi, f"{br.EXACT_CLOSED}/{den.upper_method}",
                   f"{br.EXACT_CLOSED}/{den.lower_method}")


@dataclass(frozen=True)
class PiEstimate:
    """Best summing ratio found by a finite family search (a lower bound)."""

    value: float
    bracket: Bracket
    family: PairFamily
    mode: SummingMode
    q: float
    evaluations: int
    note: str = "lower bound: supremum over families is never exhausted"


def _polygon_pairs(n: int, axes: tuple[int, int], count: int,
                   antipodal: bool) -> PairFamily:
    """count directions evenly spread over a half-turn in a coordinate plane,
    paired with their antipodes (odd degrees) or their first-axis mirror."""
    a, b = axes
    th = np.pi * np.arange(count) / count
    X = np.zeros((count, n))
    X[:, a] = np.cos(th)
    X[:, b] = np.sin(th)
    if antipodal:
        return PairFamily(X, -X)
    Y = X.copy()
    Y[:, a] = -Y[:, a]
    return PairFamily(X, Y)


def _candidate_families(P: HomPoly, q: float, mode: SummingMode,
                        space: ConeMetricSpace, rng, settings: Settings):
    n, d = space.n, space.d
    zero = np.zeros(n)
    # singletons: map witness against origin, then random pairs
    sup = poly_sup_bracket(P.coeffs, space.base, settings=settings,
                           gap_target=5e-2)
    yield PairFamily(sup.witness[None], zero[None])
    for _ in range(6):
        yield PairFamily(rng.standard_normal((1, n)), zero[None])
        yield PairFamily(rng.standard_normal((1, n)), rng.standard_normal((1, n)))
    # unit stars (the squared-norm polynomial makes both denominators k)
    eye = np.eye(n)
    for k in (2, n):
        yield PairFamily(eye[:k], np.zeros((k, n)))
    if d == 1:
        # singular frame: exact extremal star for q = 2
        _, _, Vt = np.linalg.svd(P.coeffs)
        yield PairFamily(Vt, np.zeros((n, n)))
        planes = [(0, 1)] + ([(0, 2), (1, 2)] if n >= 3 else [])
        for count in (3, 5):
            for ax in planes:
                yield _polygon_pairs(n, ax, count, antipodal=True)
    elif d % 2 == 1:
        for count in (2, 3):
            yield _polygon_pairs(n, (0, 1), count, antipodal=True)
    else:
        for count in (2, 3):
            yield _polygon_pairs(n, (0, 1), count, antipodal=False)
    kmax = 3 if (mode is SummingMode.LIP and q > 1.0) else min(6, settings.family_cap)
    for k in sorted({2, 3, kmax}):
        for _ in range(3):
            yield PairFamily(rng.standard_normal((k, n)),
                             rng.standard_normal((k, n)))


def estimate_pi_q(P: HomPoly, q: float, mode: SummingMode,
                  space: ConeMetricSpace, budget: int = 64, seed: int = 0,
                  cod: BaseNorm = BaseNorm.L2,
                  settings: Settings | None = None,
                  extra_families=()) -> PiEstimate:
    """Search pair families for the largest certified summing ratio.

    Random and structured seed families, then coordinate perturbation around
    the incumbent.  The returned value is the certified lower end of the best
    ratio bracket; the true constant is a supremum over all finite families
    and can only be approached from below.
    """
    settings = space.settings if settings is None else settings
    rng = child_rng(seed, 0xE571, space.n, space.d, int(q * 16))
    best: tuple[float, Bracket, PairFamily] | None = None
    evals = 0

    def consider(fam: PairFamily):
        nonlocal best, evals
        if evals >= budget:
            return
        try:
            ratio = summing_ratio(P, fam, q, mode, space, cod, settings,
                                  seed=seed)
        except (DegenerateFamily, FamilyTooLarge):
            return
        except BudgetExhausted:
            return
        evals += 1
        if best is None or ratio.lower > best[0]:
            best = (ratio.lower, ratio, fam)

    for fam in extra_families:
        consider(_as_family(fam))
    for fam in _candidate_families(P, q, mode, space, rng, settings):
        if evals >= max(budget - 16, budget // 2):
            break
        consider(fam)
    if best is None:
        raise DegenerateFamily("no family produced a usable denominator")

    # local refinement: perturb one pair of the incumbent at a time
    step = 0.4
    while evals < budget and step > 1e-3:
        _, _, fam = best
        improved = False
        for i in range(fam.k):
            if evals >= budget:
                break
            trial = PairFamily(fam.X.copy(), fam.Y.copy())
            trial.X[i] += step * rng.standard_normal(space.n)
            trial.Y[i] += step * rng.standard_normal(space.n)
            before = best[0]
            consider(trial)
            if best[0] > before * (1.0 + 1e-9):
                improved = True
                break
        if not improved:
            step *= 0.5

    value, ratio, fam = best
    return PiEstimate(value, ratio, fam, mode, q, evals)


def benchmark_instances() -> list:
    """Fixed mode-agreement benchmark: (label, map, n, d, q) tuples.

    Maps are chosen so the best ratio is expressible through families the
    capped searches can reach in BOTH modes: polygon geometry for linear
    maps (plane-dominated when n = 3) and norm-one scalar forms for d = 2,
    where the form itself dominates every family and pins both modes at 1.
    """
    def form(M):
        return HomPoly(np.asarray(M, dtype=float)[None])

    return [
        ("identity-r2-q1", HomPoly(np.eye(2)), 2, 1, 1.0),
        ("identity-r2-q2", HomPoly(np.eye(2)), 2, 1, 2.0),
        ("plane-proj-r3-q1", HomPoly(np.diag([1.0, 1.0, 0.0])), 3, 1, 1.0),
        ("plane-proj-r3-q2", HomPoly(np.diag([1.0, 1.0, 0.0])), 3, 1, 2.0),
        ("diag-half-r2-q2", HomPoly(np.diag([1.0, 0.5])), 2, 1, 2.0),
        ("trace-form-r2-q1", form(np.eye(2)), 2, 2, 1.0),
        ("trace-form-r2-q2", form(np.eye(2)), 2, 2, 2.0),
        ("signature-form-r2-q2", form(np.diag([1.0, -1.0])), 2, 2, 2.0),
        ("trace-form-r3-q1", form(np.eye(3)), 3, 2, 1.0),
        ("trace-form-r3-q2", form(np.eye(3)), 3, 2, 2.0),
    ]


# ---------------------------------------------------------------------------
# Pietsch measures and the discrete factorization


@dataclass(frozen=True)
class FunctionalSample:
    """Scalar polynomial with a certified sup-norm upper bound (<= 1)."""

    poly: HomPoly
    norm_upper: float

    def increments(self, family: PairFamily) -> np.ndarray:
        return np.asarray([float(eval_poly(self.poly, x)[0]
                                 - eval_poly(self.poly, y)[0])
                           for x, y in family])


def norming_poly(x, base: BaseNorm, d: int) -> FunctionalSample:
    """Power of the norming functional: sup norm exactly 1, value ||x||^d at x."""
    phi = norming_functional(np.asarray(x, dtype=float).ravel(), base)
    return FunctionalSample(HomPoly(veronese(phi, d)[None]), 1.0)


def sample_dictionary(n: int, d: int, base: BaseNorm, count: int,
                      seed: int = 0, settings: Settings = DEFAULTS,
                      anchors=()) -> list[FunctionalSample]:
    """Norming powers for every anchor, then random normalized polynomials."""
    out = []
    for a in anchors:
        a = np.asarray(a, dtype=float).ravel()
        if np.linalg.norm(a) > 1e-12:
            out.append(norming_poly(a, base, d))
    rng = child_rng(seed, 0xD1C7, n, d, count)
    while len(out) < count:
        A = symmetrize(rng.standard_normal((n,) * d))
        sup = poly_sup_bracket(A[None], base, settings=settings,
                               gap_target=2e-2).bracket
        if sup.upper < 1e-10:
            continue
        out.append(FunctionalSample(HomPoly(A[None] / sup.upper), 1.0))
    return out


@dataclass(frozen=True)
class PietschCertificate:
    """Discrete dominating measure over sampled norm-one functionals."""

    functionals: tuple
    weights: np.ndarray
    constant: float
    q: float
    violation: float
    pairs: PairFamily
    gram: np.ndarray          # |p_j(x_i) - p_j(y_i)|^q, shape (k, J)
    increments: np.ndarray    # ||P(x_i) - P(y_i)||^q, shape (k,)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if abs(float(np.sum(w)) - 1.0) > 1e-10 or np.any(w < -1e-12):
            raise NumericalFailure("weights are not a probability vector")
        object.__setattr__(self, "weights", w)

    def dominates(self, target, family, cod: BaseNorm = BaseNorm.L2,
                  slack: float = 1e-6) -> bool:
        fam = _as_family(family)
        lhs = pair_increments(target, fam, cod) ** self.q
        G = np.stack([np.abs(f.increments(fam)) ** self.q
                      for f in self.functionals], axis=1)
        rhs = self.constant ** self.q * (G @ self.weights)
        return bool(np.all(lhs <= rhs + slack * (1.0 + np.abs(rhs))))


def pietsch_measure(P, families, q: float, C: float, functionals,
                    cod: BaseNorm = BaseNorm.L2,
                    settings: Settings = DEFAULTS) -> PietschCertificate:
    """Recover a discrete dominating measure by linear programming.

    Minimizes the worst violation t of
        ||P(x)-P(y)||^q <= C^q * sum_j w_j |p_j(x)-p_j(y)|^q + t
    over probability weights w.  A certificate with t <= 1e-6 is accepted;
    otherwise the dictionary is too coarse and the minimal t is reported so
    the caller can refine.
    """
    fam = families if isinstance(families, PairFamily) else _concat_families(families)
    functionals = list(functionals)
    for f in functionals:
        if f.norm_upper > 1.0 + 1e-9:
            raise NumericalFailure("dictionary entry lacks a norm-1 certificate")
    r = pair_increments(P, fam, cod) ** q
    G = np.stack([np.abs(f.increments(fam)) ** q for f in functionals], axis=1)
    k, J = G.shape

    # variables: w (J), t (free), s (k) slack; rows: C^q G w + t - s = r; sum w = 1
    A = np.zeros((k + 1, J + 1 + k))
    A[:k, :J] = (C ** q) * G
    A[:k, J] = 1.0
    A[:k, J + 1:] = -np.eye(k)
    A[k, :J] = 1.0
    b = np.concatenate([r, [1.0]])
    lb = np.concatenate([np.zeros(J), [-np.inf], np.zeros(k)])
    ub = np.full(J + 1 + k, np.inf)
    c = np.zeros(J + 1 + k)
    c[J] = 1.0
    sol = lp_solve(LPProblem.build(c, A, b, lb, ub), settings)
    if sol.status is not LPStatus.OPTIMAL:
        raise NumericalFailure(f"measure-recovery LP ended {sol.status.value}")
    w = np.maximum(sol.x[:J], 0.0)
    w /= np.sum(w)
    t = float(np.max(r - (C ** q) * (G @ w), initial=-np.inf))
    cert = PietschCertificate(tuple(functionals), w, C, q, t, fam, G, r)
    if t > 1e-6:
        raise PietschInfeasible(
            f"best achievable violation {t:.3e} exceeds 1e-6; refine the "
            f"dictionary", violation=t, certificate=cert)
    return cert


def _concat_families(families) -> PairFamily:
    fams = [_as_family(f) for f in families]
    return PairFamily(np.vstack([f.X for f in fams]),
                      np.vstack([f.Y for f in fams]))


def all_pairs(points, include_origin: bool = True) -> PairFamily:
    """Every unordered pair of the given points (optionally with the origin).

    A measure recovered against this family dominates every increment among
    the points, which is exactly what a factorization over them requires.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if include_origin:
        pts = np.vstack([pts, np.zeros(pts.shape[1])])
    idx = list(itertools.combinations(range(pts.shape[0]), 2))
    return PairFamily(pts[[i for i, _ in idx]], pts[[j for _, j in idx]])


@dataclass(frozen=True)
class McShaneFunction:
    """Inf-convolution extension of anchored values at a fixed constant."""

    anchors: np.ndarray
    values: np.ndarray
    L: float
    metric: Callable[[np.ndarray, np.ndarray], np.ndarray]

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float).ravel()
        return float(np.min(self.values + self.L * self.metric(self.anchors, x)))


def _euclidean_rows(A: np.ndarray, x: np.ndarray) -> np.ndarray:
    return np.linalg.norm(A - x[None, :], axis=1)


def mcshane_extend(points, values, L: float, metric=None) -> McShaneFunction:
    """Extend values on finitely many anchors to an L-Lipschitz function.

    The pairwise constant is checked first; the extension agrees on the
    anchors and is L-Lipschitz everywhere for any metric.
    """
    A = np.asarray(points, dtype=float)
    if A.ndim == 1:
        A = A[:, None]  # scalar anchors
    if A.shape[0] != np.asarray(values).size:
        raise DimensionMismatch("one value per anchor required")
    vals = np.asarray(values, dtype=float).ravel()
    dist = _euclidean_rows if metric is None else metric
    scale = 1.0 + float(np.max(np.abs(vals), initial=0.0))
    for i in range(A.shape[0]):
        d_i = dist(A, A[i])
        bad = np.abs(vals - vals[i]) > L * d_i + 1e-12 * scale
        if np.any(bad):
            j = int(np.nonzero(bad)[0][0])
            raise NotLipschitzOnS(
                f"anchors {i} and {j} violate the constant {L}: "
                f"|{vals[i]:.6g} - {vals[j]:.6g}| > {L:.6g} * {d_i[j]:.6g}")
    return McShaneFunction(A, vals, float(L), dist)


@dataclass(frozen=True)
class DiscreteFactorization:
    """Map split through sampled functionals and a weighted q-mean inclusion.

    The first leg sends a cone point to its functional value vector under the
    sup metric; reweighting by w^(1/q) turns that into a q-mean metric; the
    outer leg interpolates the target values on the reweighted image.
    """

    certificate: PietschCertificate
    points: np.ndarray
    alpha: np.ndarray
    middle: np.ndarray
    beta: tuple
    lip_beta: float
    residual: float

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float).ravel()
        row = np.asarray([float(eval_poly(f.poly, x)[0])
                          for f in self.certificate.functionals])
        mid = row * self.certificate.weights ** (1.0 / self.certificate.q)
        return np.asarray([b(mid) for b in self.beta])


def build_factorization(cert: PietschCertificate, target, points,
                        cod: BaseNorm = BaseNorm.L2,
                        settings: Settings = DEFAULTS) -> DiscreteFactorization:
    """Assemble the three-leg split certified by a dominating measure.

    Anchors are the given cone base points; the certificate constant bounds
    the outer leg, which is checked pairwise before extension and again on
    the reconstructed values.
    """
    if cert.violation > 1e-6:
        raise NumericalFailure("certificate violation exceeds the 1e-6 gate")
    q = cert.q
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    N = pts.shape[0]
    alpha = np.stack([np.asarray([float(eval_poly(f.poly, x)[0])
                                  for f in cert.functionals]) for x in pts])
    wq = cert.weights ** (1.0 / q)
    middle = alpha * wq[None, :]
    F = np.stack([_apply_target(target, x) for x in pts])
    L = cert.constant * (1.0 + 1e-6)

    lip_beta = 0.0
    scale = 1.0 + float(np.max(np.abs(F)))
    for i in range(N):
        dm = np.sum(np.abs(middle - middle[i]) ** q, axis=1) ** (1.0 / q)
        df = np.asarray([vector_norm(F[j] - F[i], cod) for j in range(N)])
        bad = df > L * dm + 1e-9 * scale
        if np.any(bad):
            j = int(np.nonzero(bad)[0][0])
            raise LipschitzExceeded(
                f"pairs {i},{j}: increment {df[j]:.6g} exceeds "
                f"{L:.6g} * {dm[j]:.6g}")
        with np.errstate(invalid="ignore", divide="ignore"):
            ratios = np.where(dm > 1e-14, df / np.where(dm > 1e-14, dm, 1.0), 0.0)
        lip_beta = max(lip_beta, float(np.max(ratios, initial=0.0)))

    def qmetric(Arows, x):
        return np.sum(np.abs(Arows - x[None, :]) ** q, axis=1) ** (1.0 / q)

    beta = tuple(mcshane_extend(middle, F[:, j], L, metric=qmetric)
                 for j in range(F.shape[1]))
    recon = np.stack([[b(middle[i]) for b in beta] for i in range(N)])
    residual = float(np.max(np.abs(recon - F))) / scale
    if residual > 1e-8:
        raise NumericalFailure(f"composition residual {residual:.3e} too large")
    return DiscreteFactorization(cert, pts, alpha, middle, beta, lip_beta,
                                 residual)
