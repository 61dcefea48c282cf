"""The moment cone {x^{(x)d}} as a metric space.

Distances are tensor-norm brackets of differences of d-th powers, under a
selectable cross norm (or the symmetric projective norm).  Experiments sample
point pairs, including adversarial near-antipodal and near-collinear ones,
and report extreme distance ratios between two norms or between a coordinate
subspace and the ambient space.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

import numpy as np

from . import bracket as br
from .balls import BaseNorm
from .bracket import Bracket, ratio_bracket
from .config import DEFAULTS, Settings
from .errors import DimensionMismatch, NonCoordinateSubspace, UnsupportedNorm
from .norms import NormSelector, tensor_norm
from .rng import child_rng
from .tensors import ConePoint, veronese


@dataclass(frozen=True)
class ConeMetricSpace:
    n: int
    d: int
    base: BaseNorm
    selector: NormSelector
    settings: Settings = field(default=DEFAULTS)

    @property
    def origin(self) -> ConePoint:
        return ConePoint(np.zeros(self.n), self.d)

    def point(self, x) -> ConePoint:
        x = np.asarray(x, dtype=float).ravel()
        if x.size != self.n:
            raise DimensionMismatch(f"expected dim {self.n}, got {x.size}")
        return ConePoint(x, self.d)

    def distance(self, u: ConePoint, v: ConePoint) -> Bracket:
        return cone_distance(u, v, self)


def cone_distance(u: ConePoint, v: ConePoint, space: ConeMetricSpace) -> Bracket:
    """Bracket for the norm of u - v realized as degree-d tensors."""
    if u.degree != space.d or v.degree != space.d:
        raise DimensionMismatch("degree mismatch with the space")
    if u.x.size != space.n or v.x.size != space.n:
        raise DimensionMismatch("dimension mismatch with the space")
    if np.array_equal(u.x, v.x):
        return br.point(0.0, br.EXACT_CLOSED)
    w = veronese(u.x, space.d) - veronese(v.x, space.d)
    hints = _pair_hints(u.x, v.x)
    return tensor_norm(w, space.selector, space.base, space.settings,
                       hints=hints)


def _pair_hints(x: np.ndarray, y: np.ndarray):
    out = [x, y, x - y, x + y]
    return [h for h in out if np.linalg.norm(h) > 1e-14]


@dataclass(frozen=True)
class DistortionReport:
    samples: int
    max_ratio: float
    min_ratio: float
    bound: float
    passed: bool
    seed: int
    worst_pair: tuple = ()

    def as_dict(self) -> dict:
        return {
            "samples": self.samples,
            "max_ratio": self.max_ratio,
            "min_ratio": self.min_ratio,
            "bound": self.bound,
            "passed": self.passed,
            "seed": self.seed,
            "worst_pair": [list(map(float, v)) for v in self.worst_pair],
        }


def sample_cone_pairs(n: int, seed: int, count: int,
                      adversarial: bool = True) -> list:
    """Random vector pairs; a share are near-antipodal, near-collinear, or
    scale-skewed, where distortion extremes concentrate."""
    rng = child_rng(seed, 0xC0DE, n, count)
    pairs = []
    while len(pairs) < count:
        x = rng.standard_normal(n)
        if np.linalg.norm(x) < 1e-9:
            continue
        kind = len(pairs) % 5 if adversarial else 0
        if kind == 1:
            y = -x + 10.0 ** rng.uniform(-6, -1) * rng.standard_normal(n)
        elif kind == 2:
            y = rng.uniform(0.2, 5.0) * x + 10.0 ** rng.uniform(-6, -1) \
                * rng.standard_normal(n)
        elif kind == 3:
            y = x * 10.0 ** rng.uniform(-2, 2)
        else:
            y = rng.standard_normal(n)
        if np.linalg.norm(x - y) < 1e-12:
            continue
        pairs.append((x, y))
    return pairs


def equivalence_band(d: int, alpha: NormSelector,
                     beta: NormSelector) -> float:
    """Proven bound on cone-distance ratios between the two selectors.

    Cross norms are 2^{d-1}-equivalent on the cone.  The symmetric
    projective metric compares with a cross norm only through polarization,
    which costs a further d^d/d!.
    """
    cross = (NormSelector.INJECTIVE, NormSelector.PROJECTIVE)
    if alpha in cross and beta in cross:
        return 2.0 ** (d - 1)
    if alpha == beta:
        return 1.0
    return 2.0 ** (d - 1) * d ** d / factorial(d)


def bilipschitz_experiment(n: int, d: int, base: BaseNorm, selectors,
                           samples: int, seed: int,
                           settings: Settings = DEFAULTS,
                           slack: float = 1e-3) -> DistortionReport:
    """Extreme ratios d_alpha/d_beta over sampled cone pairs, checked against
    the equivalence band [1/B, B] for the selector pair.

    Requires both selectors to resolve with relative gap <= 1e-3 at this
    (n, d, base); heuristic-only configurations are rejected rather than
    silently reported.
    """
    alpha, beta = selectors
    bound = equivalence_band(d, alpha, beta)
    space_a = ConeMetricSpace(n, d, base, alpha, settings)
    space_b = ConeMetricSpace(n, d, base, beta, settings)
    pairs = sample_cone_pairs(n, seed, samples)
    max_ratio = -np.inf
    min_ratio = np.inf
    worst = ()
    for x, y in pairs:
        u, v = ConePoint(x, d), ConePoint(y, d)
        da = cone_distance(u, v, space_a)
        db = cone_distance(u, v, space_b)
        for name, bb in (("first", da), ("second", db)):
            if bb.rel_gap > 1e-3:
                raise UnsupportedNorm(
                    f"{name} selector resolves to gap {bb.rel_gap:.2e} > 1e-3 "
                    f"at n={n}, d={d}, base={base.value}")
        ratio = ratio_bracket(da, db)
        if ratio.upper > max_ratio:
            max_ratio = ratio.upper
            worst = (x.copy(), y.copy())
        min_ratio = min(min_ratio, ratio.lower)
    passed = (max_ratio <= bound * (1.0 + slack)
              and min_ratio >= (1.0 / bound) * (1.0 - slack))
    return DistortionReport(len(pairs), float(max_ratio), float(min_ratio),
                            bound, bool(passed), seed, worst)


def _coordinate_support(basis: np.ndarray) -> np.ndarray:
    """Coordinate indices spanned by an axis-aligned basis."""
    basis = np.atleast_2d(np.asarray(basis, dtype=float))
    support = []
    for row in basis:
        nz = np.nonzero(np.abs(row) > 1e-12)[0]
        if nz.size != 1:
            raise NonCoordinateSubspace(
                "basis vectors must be multiples of standard basis vectors")
        if int(nz[0]) in support:
            raise NonCoordinateSubspace("repeated coordinate in basis")
        support.append(int(nz[0]))
    return np.array(sorted(support), dtype=int)


def subspace_distortion(n: int, d: int, base: BaseNorm, basis,
                        selector: NormSelector, samples: int, seed: int,
                        settings: Settings = DEFAULTS) -> DistortionReport:
    """Cone distances inside a coordinate subspace versus the ambient space.

    Inclusion is distance non-increasing in neither direction here: the
    subspace computation and the zero-padded ambient computation describe the
    same tensor, so injective-norm ratios must be exactly 1; brackets for the
    other selectors are only required to stay within the equivalence band.
    """
    support = _coordinate_support(basis)
    if support.size == 0 or support[-1] >= n:
        raise NonCoordinateSubspace("basis does not fit the ambient space")
    nz = support.size
    sub_space = ConeMetricSpace(nz, d, base, selector, settings)
    amb_space = ConeMetricSpace(n, d, base, selector, settings)
    pairs = sample_cone_pairs(nz, seed, samples)
    max_ratio = -np.inf
    min_ratio = np.inf
    worst = ()
    for xs, ys in pairs:
        x = np.zeros(n)
        y = np.zeros(n)
        x[support] = xs
        y[support] = ys
        d_sub = cone_distance(ConePoint(xs, d), ConePoint(ys, d), sub_space)
        d_amb = cone_distance(ConePoint(x, d), ConePoint(y, d), amb_space)
        ratio = ratio_bracket(d_sub, d_amb)
        if ratio.upper > max_ratio:
            max_ratio = ratio.upper
            worst = (xs.copy(), ys.copy())
        min_ratio = min(min_ratio, ratio.lower)
    if selector is NormSelector.INJECTIVE:
        bound = 1.0
        passed = max_ratio <= 1.0 + 1e-8 and min_ratio >= 1.0 - 1e-8
    else:
        bound = 2.0 ** (d - 1)
        passed = (max_ratio <= bound * (1.0 + 1e-9)
                  and min_ratio >= (1.0 / bound) * (1.0 - 1e-9))
    return DistortionReport(len(pairs), float(max_ratio), float(min_ratio),
                            bound, bool(passed), seed, worst)
