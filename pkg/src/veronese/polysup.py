"""Certified suprema of homogeneous polynomial maps over unit balls.

Computes two-sided brackets for  sup { ||P(x)||_cod : ||x||_base <= 1 }  where
P : R^n -> R^m is d-homogeneous with symmetric coefficient tensors.  Exact
routes exist for d = 1 (operator norms) and for scalar quadratics over the
Euclidean ball (eigenvalues).  Otherwise the lower bound comes from projected
multi-start ascent and the upper bound from the smaller of a coefficient bound
and a grid + Lipschitz branch-and-bound cover of the unit sphere.

Vertex enumeration over a polytope ball is only valid for d = 1: for d >= 2
the diagonal of the multilinear form is not affine on faces, so the maximum
can sit in a face interior.  The covers are therefore geometric:

* Euclidean ball: hyperspherical angle boxes (the angle map is 1-Lipschitz
  per angle into the sphere)
* l1 ball: one simplex chart per sign orthant, boxes evaluated at their
  lower corner, which always lies in the simplex
* sup ball: one cube chart per fixed coordinate x_j = 1

Global sign symmetry |P(-x)| = |P(x)| halves the chart count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import bracket as br
from .balls import BaseNorm, ball_vertices, base_sphere_grid, vector_norm
from .bracket import Bracket
from .config import DEFAULTS, Settings
from .errors import DimensionTooLarge
from .linalg import spectral_norm, sym_eig
from .rng import child_rng
from ._kernels import multilinear_max

MAXSIGN_COD = 14


def poly_eval_batch(coeffs: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Values (B, m) of the m polynomials with coefficient tensors `coeffs`
    (shape (m,) + (n,)*d) at the B points in X (shape (B, n))."""
    m = coeffs.shape[0]
    d = coeffs.ndim - 1
    B = X.shape[0]
    W = np.broadcast_to(coeffs.reshape((m, 1) + coeffs.shape[1:]),
                        (m, B) + coeffs.shape[1:])
    for _ in range(d):
        W = np.einsum("mbi...,bi->mb...", W, X)
    return W.T.copy()


def poly_grad_batch(coeffs: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Gradients (B, m, n): grad p_j(x) = d * <A_j, x^{d-1}, .>."""
    m = coeffs.shape[0]
    d = coeffs.ndim - 1
    B = X.shape[0]
    W = np.broadcast_to(coeffs.reshape((m, 1) + coeffs.shape[1:]),
                        (m, B) + coeffs.shape[1:])
    for _ in range(d - 1):
        W = np.einsum("mbi...,bi->mb...", W, X)
    return d * np.transpose(W, (1, 0, 2))


def codomain_norms(vals: np.ndarray, cod: BaseNorm) -> np.ndarray:
    if cod is BaseNorm.L1:
        return np.sum(np.abs(vals), axis=-1)
    if cod is BaseNorm.L2:
        return np.linalg.norm(vals, axis=-1)
    return np.max(np.abs(vals), axis=-1)


def combine_coordinate_bounds(bounds: np.ndarray, cod: BaseNorm) -> float:
    # ||P(x)||_cod <= cod-norm of the per-coordinate sup bounds
    return float(codomain_norms(np.atleast_1d(bounds)[None, :], cod)[0])


def multilinear_bound_scalar(A: np.ndarray, base: BaseNorm,
                             settings: Settings = DEFAULTS) -> float:
    """Certified upper bound on sup |<A, x_1 x ... x x_d>| over base-unit
    tuples; exact for polytope bases within the enumeration budget."""
    A = np.asarray(A, dtype=float)
    d = A.ndim
    n = A.shape[0]
    if base is BaseNorm.L1:
        return float(np.max(np.abs(A)))  # extreme tuples are signed basis vectors
    if base is BaseNorm.LINF:
        try:
            V = ball_vertices(BaseNorm.LINF, n)
            if V.shape[0] ** d <= settings.enum_budget:
                val, _ = multilinear_max(A, V)
                return val
        except DimensionTooLarge:
            pass
        return float(np.sum(np.abs(A)))  # |x_i| <= 1 coordinatewise
    cands = [float(np.linalg.norm(A)), float(np.sum(np.abs(A)))]
    for ax in range(d):
        cands.append(spectral_norm(np.moveaxis(A, ax, 0).reshape(n, -1)))
    return min(cands)


@dataclass(frozen=True)
class SupResult:
    bracket: Bracket
    witness: np.ndarray  # base-unit point attaining the lower bound


def poly_sup_bracket(coeffs: np.ndarray, base: BaseNorm,
                     cod: BaseNorm = BaseNorm.L2,
                     settings: Settings = DEFAULTS,
                     seed: int = 0, gap_target: float | None = None) -> SupResult:
    coeffs = np.asarray(coeffs, dtype=float)
    m = coeffs.shape[0]
    d = coeffs.ndim - 1
    n = coeffs.shape[1]
    gap = settings.gap_target if gap_target is None else gap_target

    if not np.any(coeffs):
        return SupResult(br.point(0.0, br.EXACT_CLOSED), _first_unit(n))

    if n == 1:
        val = combine_coordinate_bounds(np.abs(coeffs.reshape(m)), cod)
        return SupResult(br.point(val, br.EXACT_CLOSED), np.ones(1))

    if d == 1:
        return _sup_linear(coeffs, base, cod)

    if d == 2 and m == 1 and base is BaseNorm.L2:
        w, v = sym_eig(coeffs[0])
        return SupResult(br.point(float(np.abs(w[0])), br.EXACT_EIG), v[:, 0])

    lower, witness = _ascent_lower(coeffs, base, cod, settings, seed)

    per_coord = np.array([multilinear_bound_scalar(coeffs[j], base, settings)
                          for j in range(m)])
    coeff_upper = combine_coordinate_bounds(per_coord, cod)

    upper = coeff_upper
    upper_tag = br.COEFF_BOUND
    if n <= 4:
        lip = d * coeff_upper
        bnb_upper, bnb_lower, bnb_wit = _branch_and_bound(
            coeffs, base, cod, lip, lower, gap, settings)
        if bnb_lower > lower and bnb_wit is not None:
            lower, witness = bnb_lower, bnb_wit
        if bnb_upper < upper:
            upper, upper_tag = bnb_upper, br.GRID_LIPSCHITZ
    upper = max(upper, lower)
    return SupResult(Bracket(lower, upper, br.ASCENT, upper_tag), witness)


def _first_unit(n: int) -> np.ndarray:
    e = np.zeros(n)
    e[0] = 1.0
    return e


def _sup_linear(coeffs: np.ndarray, base: BaseNorm, cod: BaseNorm) -> SupResult:
    M = coeffs.reshape(coeffs.shape[0], -1)  # (m, n)
    m, n = M.shape
    if base is BaseNorm.L1:
        vals = codomain_norms(M.T, cod)
        j = int(np.argmax(vals))
        wit = np.zeros(n)
        wit[j] = 1.0
        return SupResult(br.point(float(vals[j]), br.EXACT_ENUM), wit)
    if base is BaseNorm.LINF:
        V = ball_vertices(BaseNorm.LINF, n)
        vals = codomain_norms(V @ M.T, cod)
        j = int(np.argmax(vals))
        return SupResult(br.point(float(vals[j]), br.EXACT_ENUM), V[j])
    if cod is BaseNorm.L2:
        u, s, vt = np.linalg.svd(M)
        return SupResult(br.point(float(s[0]), br.EXACT_SVD), vt[0])
    if cod is BaseNorm.LINF:
        vals = np.linalg.norm(M, axis=1)
        j = int(np.argmax(vals))
        wit = M[j] / vals[j] if vals[j] > 0 else _first_unit(n)
        return SupResult(br.point(float(vals[j]), br.EXACT_CLOSED), wit)
    if m <= MAXSIGN_COD:
        S = ball_vertices(BaseNorm.LINF, m)  # codomain sign patterns
        vals = np.linalg.norm(S @ M, axis=1)
        j = int(np.argmax(vals))
        w = S[j] @ M
        nw = np.linalg.norm(w)
        wit = w / nw if nw > 0 else _first_unit(n)
        return SupResult(br.point(float(vals[j]), br.EXACT_ENUM), wit)
    raise DimensionTooLarge("codomain sign enumeration beyond cap")


def _to_base_sphere(x: np.ndarray, base: BaseNorm) -> np.ndarray:
    if base is BaseNorm.L2:
        return x
    if base is BaseNorm.L1:
        norms = np.sum(np.abs(x), axis=1)
    else:
        norms = np.max(np.abs(x), axis=1)
    return x / norms[:, None]


def _unitize(X: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(X, axis=1)
    norms[norms == 0.0] = 1.0
    return X / norms[:, None]


def _ascent_lower(coeffs, base, cod, settings: Settings, seed: int):
    n = coeffs.shape[1]
    rng = child_rng(seed, 0xA5C)
    X = np.vstack([base_sphere_grid(base, n, 4 * n + 8, seed),
                   rng.standard_normal((settings.restarts, n))])
    X = _to_base_sphere(_unitize(X), base)

    best_val = 0.0
    best_x = X[0]
    for x0 in X:
        x = x0.copy()
        val = _val_at(coeffs, x, cod)
        step = 0.5
        for _ in range(80):
            g = _norm_grad(coeffs, x, cod)
            gn = np.linalg.norm(g)
            if gn < 1e-14:
                break
            cand = x + step * g / gn
            cn = vector_norm(cand, base)
            if cn <= 1e-14:
                break
            cand = cand / cn
            cval = _val_at(coeffs, cand, cod)
            if cval > val * (1.0 + 1e-12) or (val == 0.0 and cval > 0.0):
                x, val = cand, cval
                step = min(step * 1.6, 1.0)
            else:
                step *= 0.5
                if step < 1e-9:
                    break
        if val > best_val:
            best_val, best_x = val, x
    return best_val, best_x


def _val_at(coeffs, x, cod) -> float:
    return float(codomain_norms(poly_eval_batch(coeffs, x[None, :]), cod)[0])


def _norm_grad(coeffs, x, cod) -> np.ndarray:
    vals = poly_eval_batch(coeffs, x[None, :])[0]
    grads = poly_grad_batch(coeffs, x[None, :])[0]  # (m, n)
    if cod is BaseNorm.L2:
        nv = np.linalg.norm(vals)
        if nv < 1e-15:
            return grads.sum(axis=0)
        return (vals @ grads) / nv
    if cod is BaseNorm.L1:
        s = np.sign(vals)
        s[s == 0.0] = 1.0
        return s @ grads
    j = int(np.argmax(np.abs(vals)))
    return np.sign(vals[j]) * grads[j] if vals[j] != 0 else grads[j]


# ---------------------------------------------------------------------------
# branch and bound over sphere charts


def _angles_to_sphere(theta: np.ndarray, n: int) -> np.ndarray:
    """Hyperspherical map [B, n-1] -> unit vectors [B, n]; 1-Lipschitz from
    the l1 angle metric to the Euclidean metric."""
    B = theta.shape[0]
    x = np.empty((B, n))
    sin_prod = np.ones(B)
    for i in range(n - 1):
        x[:, i] = sin_prod * np.cos(theta[:, i])
        sin_prod = sin_prod * np.sin(theta[:, i])
    x[:, n - 1] = sin_prod
    return x


class _Chart:
    """One parametric patch of the unit sphere with a Lipschitz modulus.

    kind "angle": theta box -> Euclidean sphere, modulus lip * l1-radius.
    kind "simplex": t box (lower corner + sides) in the positive face of the
        l1 sphere for a sign pattern, modulus lip * 2 * l1-size.
    kind "cube": free coordinates of a sup-sphere face, modulus
        lip * linf-radius.
    """

    __slots__ = ("kind", "aux", "lip")

    def __init__(self, kind: str, aux, lip: float):
        self.kind = kind
        self.aux = aux
        self.lip = lip


def _initial_boxes(chart: _Chart, n: int):
    k = n - 1
    if chart.kind == "angle":
        spans = np.array([np.pi] * max(k - 1, 0) + [2.0 * np.pi])
        splits = 8
        grids = [np.linspace(0, s, splits, endpoint=False) + s / (2 * splits)
                 for s in spans]
        mesh = np.meshgrid(*grids, indexing="ij")
        centers = np.stack([g.ravel() for g in mesh], axis=1)
        widths = np.tile(spans / (2 * splits), (centers.shape[0], 1))
        return centers, widths
    if chart.kind == "simplex":
        splits = 4
        grids = [np.linspace(0, 1, splits, endpoint=False)] * k
        mesh = np.meshgrid(*grids, indexing="ij")
        corners = np.stack([g.ravel() for g in mesh], axis=1)
        sides = np.full_like(corners, 1.0 / splits)
        keep = corners.sum(axis=1) <= 1.0 + 1e-12
        return corners[keep], sides[keep]
    splits = 4
    grids = [np.linspace(-1, 1, splits, endpoint=False) + 1.0 / splits] * k
    mesh = np.meshgrid(*grids, indexing="ij")
    centers = np.stack([g.ravel() for g in mesh], axis=1)
    widths = np.full_like(centers, 1.0 / splits)
    return centers, widths


def _chart_points(chart: _Chart, boxes: np.ndarray, n: int) -> np.ndarray:
    if chart.kind == "angle":
        return _angles_to_sphere(boxes, n)
    if chart.kind == "simplex":
        sign = chart.aux
        t_last = 1.0 - boxes.sum(axis=1)
        full = np.concatenate([boxes, t_last[:, None]], axis=1)
        return full * sign[None, :]
    j = chart.aux
    out = np.empty((boxes.shape[0], n))
    out[:, j] = 1.0
    cols = [i for i in range(n) if i != j]
    out[:, cols] = boxes
    return out


def _chart_radii(chart: _Chart, widths: np.ndarray) -> np.ndarray:
    if chart.kind == "angle":
        return widths.sum(axis=1)
    if chart.kind == "simplex":
        # corner-anchored: any point of the box is within l1 distance
        # sum(sides) in free coords, twice that after the last coordinate
        return 2.0 * widths.sum(axis=1)
    return widths.max(axis=1)


def _make_charts(coeffs, base, cod, lip: float, settings: Settings):
    n = coeffs.shape[1]
    if base is BaseNorm.L2:
        return [_Chart("angle", None, lip)]
    if base is BaseNorm.L1:
        # sign patterns with leading +1; |P(-x)| = |P(x)| covers the rest
        charts = []
        for bits in np.ndindex(*(2,) * (n - 1)):
            sign = np.concatenate([[1.0], 1.0 - 2.0 * np.array(bits)])
            charts.append(_Chart("simplex", sign, lip))
        return charts
    return [_Chart("cube", j, lip) for j in range(n)]


def _branch_and_bound(coeffs, base, cod, lip, lower0, gap_target,
                      settings: Settings):
    n = coeffs.shape[1]
    charts = _make_charts(coeffs, base, cod, lip, settings)
    work = []
    for ch in charts:
        boxes, widths = _initial_boxes(ch, n)
        work.append([ch, boxes, widths])

    best_lower = lower0
    best_wit = None
    upper = np.inf
    for _ in range(settings.bnb_levels):
        level_bounds = []
        for item in work:
            ch, boxes, widths = item[0], item[1], item[2]
            if boxes.shape[0] == 0:
                level_bounds.append(np.zeros(0))
                continue
            pts = _chart_points(ch, boxes, n)
            vals = codomain_norms(poly_eval_batch(coeffs, pts), cod)
            j = int(np.argmax(vals))
            if vals[j] > best_lower:
                best_lower = float(vals[j])
                best_wit = pts[j]
            level_bounds.append(vals + ch.lip * _chart_radii(ch, widths))
        upper = max((float(b.max()) for b in level_bounds if b.size),
                    default=best_lower)
        if upper <= best_lower * (1.0 + gap_target) + 1e-15:
            break
        grown = sum(2 * int((b > best_lower * (1.0 + 1e-12)).sum())
                    for b in level_bounds)
        if grown == 0 or grown > settings.box_budget:
            break  # retain the last valid upper bound
        for item, bounds in zip(work, level_bounds):
            ch, boxes, widths = item[0], item[1], item[2]
            keep = bounds > best_lower * (1.0 + 1e-12)
            boxes, widths = boxes[keep], widths[keep]
            if boxes.shape[0] == 0:
                item[1], item[2] = boxes, widths
                continue
            axes = np.argmax(widths, axis=1)
            rows = np.arange(boxes.shape[0])
            w = widths[rows, axes] / 2.0
            first = boxes.copy()
            second = boxes.copy()
            if ch.kind == "simplex":
                # children share the corner / shift by the halved side
                second[rows, axes] += w
            else:
                first[rows, axes] -= w
                second[rows, axes] += w
            new_w = widths.copy()
            new_w[rows, axes] = w
            boxes = np.vstack([first, second])
            widths = np.vstack([new_w, new_w])
            if ch.kind == "simplex":
                inside = boxes.sum(axis=1) <= 1.0 + 1e-12
                boxes, widths = boxes[inside], widths[inside]
            item[1], item[2] = boxes, widths
    return upper, best_lower, best_wit
