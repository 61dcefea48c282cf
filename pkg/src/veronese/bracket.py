"""Two-sided value brackets with per-side method tags.

Every norm-like quantity in this package is reported as a ``Bracket``: a
certified lower bound, a certified upper bound, and a tag naming the routine
that produced each side.  Tags in ``EXACT_TAGS`` mean the side is exact up to
machine precision, so lower == upper up to roundoff for fully exact modes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

SLACK = 1e-12

# exact modes (gap at roundoff level)
EXACT_ENUM = "exact-enum"            # vertex-tuple enumeration
EXACT_SVD = "exact-svd"
EXACT_EIG = "exact-eig"
EXACT_COEFF = "exact-coeff"          # coefficient l1 sum
EXACT_CLOSED = "exact-closed-form"
EXACT_SIGN_ENUM = "exact-sign-enum"  # 2^k sign patterns, exact inner values
EXACT_VERTEX = "exact-polytope-vertex"

# certified but gap-carrying modes
LP_PRIMAL = "lp-primal"              # feasible decomposition found by LP
LP_DUAL = "lp-dual-certificate"
GRID_LIPSCHITZ = "grid-lipschitz"    # branch-and-bound cover bound
COEFF_BOUND = "coefficient-bound"
TELESCOPE = "telescoping-bound"
HOLDER = "holder-bound"
THEOREM = "theorem-transfer"         # bound transported through a proved identity

# heuristic modes (valid bound, uncontrolled gap)
ALT_MAX = "alternating-maximization"
ASCENT = "projected-ascent"
PAIR_SEARCH = "pair-search"
DUAL_SAMPLE = "dual-sampling"
PEEL = "rank-one-peeling"

EXACT_TAGS = frozenset(
    {EXACT_ENUM, EXACT_SVD, EXACT_EIG, EXACT_COEFF, EXACT_CLOSED,
     EXACT_SIGN_ENUM, EXACT_VERTEX}
)


@dataclass(frozen=True)
class Bracket:
    lower: float
    upper: float
    lower_method: str
    upper_method: str

    def __post_init__(self):
        if not (self.lower <= self.upper + SLACK * max(1.0, abs(self.upper))):
            raise ValueError(
                f"bracket lower {self.lower!r} exceeds upper {self.upper!r}"
            )

    @property
    def width(self) -> float:
        return max(0.0, self.upper - self.lower)

    @property
    def rel_gap(self) -> float:
        scale = max(abs(self.lower), abs(self.upper))
        if scale == 0.0:
            return 0.0
        return self.width / scale

    @property
    def mid(self) -> float:
        return 0.5 * (self.lower + self.upper)

    @property
    def exact(self) -> bool:
        return self.lower_method in EXACT_TAGS and self.upper_method in EXACT_TAGS

    def contains(self, value: float, tol: float = 1e-9) -> bool:
        pad = tol * max(1.0, abs(value))
        return self.lower - pad <= value <= self.upper + pad

    def scaled(self, c: float) -> "Bracket":
        """Bracket of c * value for c >= 0."""
        if c < 0:
            raise ValueError("scaled() needs a nonnegative factor")
        return replace(self, lower=self.lower * c, upper=self.upper * c)

    def powered(self, p: float) -> "Bracket":
        """Bracket of value**p for a nonnegative bracket and p >= 0 monotone."""
        if self.lower < -SLACK:
            raise ValueError("powered() needs a nonnegative bracket")
        return replace(self, lower=max(0.0, self.lower) ** p, upper=self.upper ** p)

    def tighten_lower(self, value: float, method: str) -> "Bracket":
        if value > self.lower and value <= self.upper + SLACK * max(1.0, abs(self.upper)):
            return replace(self, lower=min(value, self.upper), lower_method=method)
        return self

    def tighten_upper(self, value: float, method: str) -> "Bracket":
        if value < self.upper and value >= self.lower - SLACK * max(1.0, abs(self.lower)):
            return replace(self, upper=max(value, self.lower), upper_method=method)
        return self


def point(value: float, method: str) -> Bracket:
    """Bracket collapsed onto an exactly known value."""
    return Bracket(value, value, method, method)


def ratio_bracket(num: Bracket, den: Bracket) -> Bracket:
    """Bracket of num/den for nonnegative brackets with den bounded away from 0."""
    if den.lower <= 0.0:
        raise ZeroDivisionError("denominator bracket touches zero")
    lo = max(0.0, num.lower) / den.upper
    hi = num.upper / den.lower
    return Bracket(lo, hi,
                   f"{num.lower_method}/{den.upper_method}",
                   f"{num.upper_method}/{den.lower_method}")


def close(a: float, b: float, rtol: float = 1e-9, atol: float = 1e-12) -> bool:
    return abs(a - b) <= atol + rtol * max(abs(a), abs(b))


def isfinite(b: Bracket) -> bool:
    return math.isfinite(b.lower) and math.isfinite(b.upper)
