"""Tensor norms: injective, projective, and symmetric projective.

Each norm is reported as a `Bracket` (certified lower/upper bounds with
method tags).  Exact routes:

* injective, polytope base: enumeration of dual-ball vertex tuples
* injective, Euclidean base, d = 2: largest singular value
* projective, l1 base: coefficient l1 mass (any order)
* projective, Euclidean base, d = 2: nuclear norm
* projective, sup base: column-generation-free LP over all vertex tuples
  (valid because the ball is the convex hull of its vertices, so rank-one
  atoms with vertex factors suffice)
* symmetric projective, Euclidean base, d = 2: sum of |eigenvalues|
* symmetric projective, d = 1: the base norm itself

Everything else is bracketed: heuristic ascent / greedy peeling on one side,
certified coefficient or LP-dual bounds on the other.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import bracket as br
from .balls import (BaseNorm, ball_vertices, base_sphere_grid,
                    norming_functional, vector_norm)
from .bracket import Bracket
from .config import DEFAULTS, Settings
from .errors import (BudgetExhausted, DimensionTooLarge, NotSymmetric,
                     NumericalFailure, UnsupportedNorm)
from .linalg import nuclear_norm, spectral_norm, sym_eig
from .linprog import LPProblem, LPStatus, lp_solve
from .polysup import multilinear_bound_scalar, poly_sup_bracket
from .rng import child_rng
from .tensors import (SymmetricDecomposition, apply_functionals, as_tensor,
                      sym_expand, sym_rep_indices, sym_reduce, symmetry_defect,
                      veronese)
from ._kernels import multilinear_max


class NormSelector(Enum):
    INJECTIVE = "injective"
    PROJECTIVE = "projective"
    SYM_PROJECTIVE = "sym-projective"

    @property
    def is_cross_norm(self) -> bool:
        # the symmetric projective norm dominates the projective norm on
        # symmetric tensors and can exceed it, so it is not sandwiched
        return self is not NormSelector.SYM_PROJECTIVE


@dataclass(frozen=True)
class MultilinearResult:
    bracket: Bracket
    factors: tuple  # one vector per slot attaining the lower bound


def multilinear_sup(z: np.ndarray, slot_ball: BaseNorm,
                    settings: Settings = DEFAULTS,
                    exact: bool | None = None,
                    seed: int = 0) -> MultilinearResult:
    """sup |<z, x_1 x ... x x_d>| over tuples from the `slot_ball` unit ball."""
    z = np.asarray(z, dtype=float)
    d = z.ndim
    n = z.shape[0]

    if not np.any(z):
        e = np.zeros(n)
        e[0] = 1.0
        return MultilinearResult(br.point(0.0, br.EXACT_CLOSED), (e,) * d)

    if d == 1:
        val = vector_norm(z, slot_ball.dual())
        return MultilinearResult(br.point(val, br.EXACT_CLOSED),
                                 (norming_functional(z, slot_ball.dual()),))

    if slot_ball.is_polytope:
        V = ball_vertices(slot_ball, n)
        if V.shape[0] ** d <= settings.enum_budget:
            val, idx = multilinear_max(z, V)
            return MultilinearResult(br.point(val, br.EXACT_ENUM),
                                     tuple(V[i] for i in idx))
        if exact:
            raise DimensionTooLarge(
                f"{V.shape[0]}^{d} vertex tuples exceed the enumeration budget")
    elif d == 2:
        u, s, vt = np.linalg.svd(z)
        return MultilinearResult(br.point(float(s[0]), br.EXACT_SVD),
                                 (u[:, 0], vt[0]))
    elif exact:
        raise UnsupportedNorm("no exact Euclidean multilinear sup for order >= 3")

    lower, factors = _alternating_max(z, slot_ball, settings, seed)
    upper = _multilinear_upper(z, slot_ball)
    upper = max(upper, lower)
    return MultilinearResult(Bracket(lower, upper, br.ALT_MAX, br.COEFF_BOUND),
                             factors)


def _slot_argmax(w: np.ndarray, slot_ball: BaseNorm) -> np.ndarray:
    # maximizer of <w, x> over the slot ball = norming functional of w
    # with respect to the dual base (its dual-dual constraint is the ball)
    return norming_functional(w, slot_ball.dual())


def _contract_all_but(z: np.ndarray, factors, skip: int) -> np.ndarray:
    g = z
    # contract from the last axis down so earlier axis numbers stay valid
    for j in reversed(range(z.ndim)):
        if j != skip:
            g = np.tensordot(g, factors[j], axes=([j], [0]))
    return g


def _alternating_max(z, slot_ball, settings: Settings, seed: int):
    d = z.ndim
    n = z.shape[0]
    rng = child_rng(seed, 0xA17)
    best_val = 0.0
    best = None
    for r in range(max(4, settings.restarts // 4)):
        if r == 0:
            # matricization-based warm start
            u, s, vt = np.linalg.svd(z.reshape(n, -1))
            f = [u[:, 0]] + [rng.standard_normal(n) for _ in range(d - 1)]
        else:
            f = [rng.standard_normal(n) for _ in range(d)]
        f = [x / max(np.linalg.norm(x), 1e-300) for x in f]
        f = [_slot_argmax(x, slot_ball) if slot_ball.is_polytope else x for x in f]
        val = 0.0
        for _ in range(60):
            prev = val
            for i in range(d):
                w = _contract_all_but(z, f, i)
                f[i] = _slot_argmax(w, slot_ball)
            val = abs(float(apply_functionals(z, f)))
            if val <= prev * (1.0 + 1e-13):
                break
        if val > best_val:
            best_val, best = val, tuple(f)
    if best is None:
        e = np.zeros(n)
        e[0] = 1.0
        best = (e,) * d
    return best_val, best


def _multilinear_upper(z: np.ndarray, slot_ball: BaseNorm) -> float:
    d = z.ndim
    n = z.shape[0]
    cands = [float(np.sum(np.abs(z)))]  # slot balls have coordinates in [-1, 1]
    if slot_ball is not BaseNorm.LINF:
        # slot ball inside the Euclidean ball
        cands.append(float(np.linalg.norm(z)))
        for ax in range(d):
            m = np.moveaxis(z, ax, 0).reshape(n, -1)
            cands.append(spectral_norm(m))
    else:
        c = float(np.sqrt(n))
        cands.append(float(np.linalg.norm(z)) * c ** d)
        for ax in range(d):
            m = np.moveaxis(z, ax, 0).reshape(n, -1)
            cands.append(spectral_norm(m) * c ** d)
    return min(cands)


def injective_norm(z, base: BaseNorm, settings: Settings = DEFAULTS,
                   exact: bool | None = None, seed: int = 0) -> Bracket:
    """Injective cross norm: sup of |<z, phi_1 x ... x phi_d>| over dual-unit
    functionals."""
    z = as_tensor(z)
    return multilinear_sup(z, base.dual(), settings, exact, seed).bracket


def projective_norm(z, base: BaseNorm, settings: Settings = DEFAULTS,
                    exact: bool | None = None, seed: int = 0) -> Bracket:
    """Projective cross norm: least total cost of a rank-one decomposition,
    cost of an atom being the product of its factor norms."""
    z = as_tensor(z)
    d = z.ndim
    n = z.shape[0]

    if not np.any(z):
        return br.point(0.0, br.EXACT_CLOSED)
    if d == 1:
        return br.point(vector_norm(z, base), br.EXACT_CLOSED)
    if base is BaseNorm.L1:
        # basis atoms are optimal; the sign functional is multilinearly
        # bounded by 1 on l1 tuples and attains the same value
        return br.point(float(np.sum(np.abs(z))), br.EXACT_COEFF)
    if base is BaseNorm.L2 and d == 2:
        return br.point(nuclear_norm(z), br.EXACT_SVD)
    if base is BaseNorm.LINF:
        V = ball_vertices(BaseNorm.LINF, n)
        natoms = (V.shape[0] // 2) * V.shape[0] ** (d - 1)
        if natoms <= settings.atom_cap:
            return _projective_lp_linf(z, V, settings)
        if exact:
            raise DimensionTooLarge(
                f"{natoms} vertex-product atoms exceed the atom cap")
    elif exact:
        raise UnsupportedNorm(
            "no exact projective route for the Euclidean base at order >= 3")

    return _projective_heuristic(z, base, settings, seed)


def _vertex_product_atoms(V: np.ndarray, d: int) -> np.ndarray:
    """All rank-one tensors with vertex factors, one global sign each,
    flattened to rows."""
    half = V[V[:, 0] > 0]  # global-sign representatives via the first slot
    M = half
    for _ in range(d - 1):
        M = np.einsum("ai,bj->abij", M.reshape(M.shape[0], -1),
                      V).reshape(M.shape[0] * V.shape[0], -1)
    return M


def _projective_lp_linf(z: np.ndarray, V: np.ndarray,
                        settings: Settings) -> Bracket:
    d = z.ndim
    M = _vertex_product_atoms(V, d)  # (natoms, n^d), every factor unit
    zf = z.ravel()
    A = np.hstack([M.T, -M.T])
    c = np.ones(A.shape[1])
    sol = lp_solve(LPProblem.build(c, A, zf, 0.0, np.inf), settings)
    if sol.status is not LPStatus.OPTIMAL:
        # every tensor is spanned by vertex products, so this is numerical
        return _projective_heuristic(z, BaseNorm.LINF, settings, seed=0)
    lam = sol.x[: M.shape[0]] - sol.x[M.shape[0]:]
    resid = float(np.sum(np.abs(zf - M.T @ lam)))
    upper = float(np.sum(np.abs(lam))) + resid  # basis atoms absorb the residual
    # dual certificate: y pairs with z; rescale by its true multilinear bound
    y = np.asarray(sol.duals)
    lower = 0.0
    if y.size == zf.size and np.any(y):
        Y = y.reshape(z.shape)
        sup, _ = multilinear_max(Y, V)
        if sup > 0:
            lower = abs(float(y @ zf)) / sup
    lower = max(lower, injective_norm(z, BaseNorm.LINF, settings).lower)
    lower = min(lower, upper)
    return Bracket(lower, upper, br.LP_DUAL, br.LP_PRIMAL)


def _projective_heuristic(z: np.ndarray, base: BaseNorm, settings: Settings,
                          seed: int) -> Bracket:
    d = z.ndim
    upper, _ = _greedy_peel(z, base, settings, seed)
    lower = injective_norm(z, base, settings, exact=None, seed=seed).lower
    if base is BaseNorm.L2:
        # z/||z||_F is multilinearly bounded by 1 on Euclidean tuples
        lower = max(lower, float(np.linalg.norm(z)))
    elif base is BaseNorm.LINF:
        S = np.sign(z)
        S[S == 0.0] = 1.0
        sup = multilinear_bound_scalar(S, BaseNorm.LINF, settings)
        if sup > 0:
            lower = max(lower, float(np.sum(np.abs(z))) / sup)
    lower = min(lower, upper)
    return Bracket(lower, upper, br.DUAL_SAMPLE, br.PEEL)


def _greedy_peel(z: np.ndarray, base: BaseNorm, settings: Settings, seed: int):
    """Greedy rank-one peeling; returns (certified upper bound, atoms).

    At every stage cost-so-far plus the l1 mass of the residual is a genuine
    decomposition cost, since basis atoms have unit factor norms.
    """
    d = z.ndim
    r = z.copy()
    scale = float(np.sum(np.abs(z)))
    cost = 0.0
    best = scale
    atoms = []
    for _ in range(60):
        lam, f = _best_rank_one(r, settings, seed)
        if abs(lam) <= 1e-15 * max(scale, 1.0):
            break
        atom_cost = abs(lam) * float(np.prod([vector_norm(x, base) for x in f]))
        t = np.array(1.0)
        for x in f:
            t = np.multiply.outer(t, x)
        r = r - lam * t.reshape(r.shape)
        cost += atom_cost
        atoms.append((lam, f))
        best = min(best, cost + float(np.sum(np.abs(r))))
        if float(np.sum(np.abs(r))) <= 1e-14 * max(scale, 1.0):
            break
    return best, atoms


def _best_rank_one(r: np.ndarray, settings: Settings, seed: int):
    """Euclidean-unit factors and weight maximizing |<r, x_1 x...x x_d>|."""
    res = multilinear_sup(r, BaseNorm.L2, settings, exact=None, seed=seed) \
        if r.ndim == 2 else None
    if res is not None:
        lam = float(apply_functionals(r, res.factors))
        return lam, res.factors
    val, f = _alternating_max(r, BaseNorm.L2, settings, seed)
    lam = float(apply_functionals(r, f))
    return lam, f


@dataclass(frozen=True)
class AtomDictionary:
    """Unit vectors serving as symmetric rank-one atom directions."""
    vectors: np.ndarray  # (k, n), unit in `base`
    base: BaseNorm

    @property
    def count(self) -> int:
        return int(self.vectors.shape[0])

    def augmented(self, more: np.ndarray) -> "AtomDictionary":
        more = np.atleast_2d(np.asarray(more, dtype=float))
        norms = np.array([vector_norm(v, self.base) for v in more])
        keep = norms > 1e-14
        if not np.any(keep):
            return self
        more = more[keep] / norms[keep, None]
        return AtomDictionary(np.vstack([self.vectors, more]), self.base)


@dataclass(frozen=True)
class SymNormResult:
    bracket: Bracket
    decomposition: SymmetricDecomposition
    atoms_used: int


def sym_projective_norm(u, base: BaseNorm, settings: Settings = DEFAULTS,
                        hints=(), tol: float | None = None,
                        strict: bool = True, seed: int = 0) -> SymNormResult:
    """Symmetric projective norm: least sum of |weight| * ||v||^d over
    decompositions of u into weighted d-th tensor powers.

    Brackets via an LP over a growing atom dictionary (upper, after adding a
    polarization-factor charge for the LP residual) against dual polynomial
    certificates (lower).  Raises BudgetExhausted with the best bracket when
    the gap target is not met within the atom cap and `strict` is set.
    """
    u = as_tensor(u)
    d = u.ndim
    n = u.shape[0]
    if symmetry_defect(u) > 1e-10 * max(float(np.max(np.abs(u))), 1e-300):
        raise NotSymmetric("symmetric projective norm needs a symmetric tensor")
    tol = settings.gap_target if tol is None else tol

    if not np.any(u):
        dec = SymmetricDecomposition(np.zeros(0), np.zeros((0, n)), d)
        return SymNormResult(br.point(0.0, br.EXACT_CLOSED), dec, 0)
    if d == 1:
        val = vector_norm(u, base)
        dec = SymmetricDecomposition(np.array([val]),
                                     (u / val)[None, :], d)
        return SymNormResult(br.point(val, br.EXACT_CLOSED), dec, 1)
    if d == 2 and base is BaseNorm.L2:
        w, v = sym_eig(u)
        keep = np.abs(w) > 1e-14 * max(abs(w[0]), 1e-300)
        dec = SymmetricDecomposition(w[keep], v[:, keep].T, 2)
        return SymNormResult(br.point(float(np.sum(np.abs(w))), br.EXACT_EIG),
                             dec, int(keep.sum()))

    return _sym_lp_bracket(u, base, settings, hints, tol, strict, seed)


def _poly_factor(d: int) -> float:
    from math import factorial
    return float(d ** d) / float(factorial(d))


def _adaptive_atoms(u: np.ndarray, settings: Settings, seed: int) -> np.ndarray:
    """Rank-one directions from symmetric power iteration with deflation."""
    d = u.ndim
    n = u.shape[0]
    rng = child_rng(seed, 0x5EED)
    out = []
    r = u.copy()
    for _ in range(2 * n + 4):
        best_lam, best_v = 0.0, None
        for t in range(3):
            v = rng.standard_normal(n)
            v /= np.linalg.norm(v)
            for _ in range(40):
                w = _contract_all_but(r, [v] * d, 0)
                nw = np.linalg.norm(w)
                if nw < 1e-15:
                    break
                v = w / nw
            lam = float(apply_functionals(r, [v] * d))
            if abs(lam) > abs(best_lam):
                best_lam, best_v = lam, v
        if best_v is None or abs(best_lam) < 1e-13 * max(np.max(np.abs(u)), 1e-300):
            break
        out.append(best_v)
        r = r - best_lam * veronese(best_v, d)
    return np.array(out) if out else np.zeros((0, n))


def _sym_lp_bracket(u, base, settings: Settings, hints, tol, strict, seed):
    d = u.ndim
    n = u.shape[0]
    reps, mults = sym_rep_indices(n, d)
    u_red = sym_reduce(u, reps)
    scale = float(np.sum(mults * np.abs(u_red)))

    seeds = [np.eye(n), -np.eye(n)]
    if base.is_polytope:
        seeds.append(ball_vertices(base, n))
    seeds.append(_adaptive_atoms(u, settings, seed))
    for h in hints:
        seeds.append(np.atleast_2d(np.asarray(h, dtype=float)))
    atoms = AtomDictionary(np.zeros((0, n)), base)
    for s in seeds:
        if s.size:
            atoms = atoms.augmented(s)
    atoms = atoms.augmented(base_sphere_grid(base, n, settings.atom_budget, seed))

    best: Bracket | None = None
    best_dec = None
    best_atoms = atoms.count
    factor = _poly_factor(d)
    grid_count = settings.atom_budget
    while True:
        A = atoms.vectors
        M = _sym_atom_matrix(A, reps)  # (k, n_reps)
        cols = np.hstack([M.T, -M.T])  # rows: representative entries
        cvec = np.ones(cols.shape[1])
        sol = lp_solve(LPProblem.build(cvec, cols, u_red, 0.0, np.inf), settings)
        upper = np.inf
        lam = None
        if sol.status is LPStatus.OPTIMAL:
            lam = sol.x[: atoms.count] - sol.x[atoms.count:]
            resid_red = u_red - M.T @ lam
            resid_l1 = float(np.sum(mults * np.abs(resid_red)))
            upper = float(np.sum(np.abs(lam))) + factor * resid_l1

        lower = _sym_dual_lower(u, u_red, reps, mults, base,
                                sol if sol.status is LPStatus.OPTIMAL else None,
                                atoms, settings, seed)
        lower = min(lower, upper)
        if np.isfinite(upper):
            cand = Bracket(lower, upper, br.LP_DUAL, br.LP_PRIMAL)
            if best is None or cand.width < best.width:
                best = cand
                best_atoms = atoms.count
                keep = np.abs(lam) > 1e-14 * max(scale, 1.0)
                best_dec = SymmetricDecomposition(lam[keep], A[keep], d)
        if best is not None and best.rel_gap <= tol:
            return SymNormResult(best, best_dec, best_atoms)
        if atoms.count >= settings.atom_cap:
            break
        grid_count *= 2
        atoms = atoms.augmented(
            base_sphere_grid(base, n, grid_count, seed + atoms.count))

    if best is None:
        raise NumericalFailure("atom LP failed at every dictionary size")
    result = SymNormResult(best, best_dec, best_atoms)
    if strict:
        raise BudgetExhausted(
            f"gap {best.rel_gap:.3e} above target {tol:.3e} "
            f"after {best_atoms} atoms", best=result)
    return result


def _sym_atom_matrix(A: np.ndarray, reps) -> np.ndarray:
    """Row k = representative entries of the d-th power of atom k."""
    k = A.shape[0]
    if k == 0:
        return np.zeros((0, len(reps)))
    cols = [np.prod(A[:, list(idx)], axis=1) for idx in reps]
    return np.stack(cols, axis=1)


def _sym_dual_lower(u, u_red, reps, mults, base, sol, atoms,
                    settings: Settings, seed: int) -> float:
    """Certified lower bounds from dual polynomials.

    Any degree-d form p gives ||u||_sym-proj >= <p-coefficients, u> / sup|p|
    on the base ball; the LP dual supplies a near-norming p, and powers of
    norming functionals give cheap exact-norm candidates.
    """
    lower = 0.0
    d = u.ndim
    n = u.shape[0]
    # powers of norming functionals: sup over ball is exactly 1; adaptive
    # and hint directions sit at the front of the dictionary
    for v in atoms.vectors[:256]:
        phi = norming_functional(v, base)
        lower = max(lower, abs(apply_functionals(u, [phi] * d)))
    if sol is not None and sol.duals.size == len(reps):
        y = sol.duals
        if np.any(y):
            B = sym_expand(y / mults, reps, n, d)
            pairing = abs(float(y @ u_red))
            sup = poly_sup_bracket(B[None], base, BaseNorm.LINF,
                                   settings, seed).bracket.upper
            if sup > 1e-300:
                lower = max(lower, pairing / sup)
    return lower


@dataclass(frozen=True)
class SandwichReport:
    injective: Bracket
    projective: Bracket
    consistent: bool
    margin: float


def sandwich_check(z, base: BaseNorm, settings: Settings = DEFAULTS,
                   seed: int = 0) -> SandwichReport:
    """Checks the cross-norm sandwich: injective lower must not exceed the
    projective upper."""
    z = as_tensor(z)
    eps = injective_norm(z, base, settings, seed=seed)
    pi = projective_norm(z, base, settings, seed=seed)
    margin = pi.upper - eps.lower
    ok = eps.lower <= pi.upper * (1.0 + 1e-9) + 1e-12
    return SandwichReport(eps, pi, bool(ok), float(margin))


def tensor_norm(t, selector: NormSelector, base: BaseNorm,
                settings: Settings = DEFAULTS, hints=(),
                seed: int = 0) -> Bracket:
    """Uniform dispatch used by the cone metrics."""
    if selector is NormSelector.INJECTIVE:
        return injective_norm(t, base, settings, seed=seed)
    if selector is NormSelector.PROJECTIVE:
        return projective_norm(t, base, settings, seed=seed)
    return sym_projective_norm(t, base, settings, hints=hints,
                               strict=False, seed=seed).bracket
