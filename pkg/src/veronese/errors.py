"""Exception hierarchy shared by all modules."""


class VeroneseError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(VeroneseError):
    """Operands live in incompatible spaces (order, dimension or codomain)."""


class DimensionTooLarge(VeroneseError):
    """An exact enumeration was requested beyond the configured budget."""


class UnsupportedNorm(VeroneseError):
    """The requested base norm has no exact routine for this operation."""


class NotSymmetric(VeroneseError):
    """A symmetric tensor was required but the input is not (within 1e-12)."""


class NotOnCone(VeroneseError):
    """The given tensor is not a d-th tensor power of any vector."""


class NotCauchy(VeroneseError):
    """The tensor sequence fails the Cauchy check at the given tolerance."""


class NonCoordinateSubspace(VeroneseError):
    """Only coordinate-aligned subspaces are supported."""


class NumericalFailure(VeroneseError):
    """An iterative routine stalled or produced an inconsistent result."""


class BudgetExhausted(VeroneseError):
    """Refinement budget ran out before the requested gap was reached.

    Carries the best bracket found so far in ``best``.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class FamilyTooLarge(VeroneseError):
    """Sign-pattern enumeration was requested for a family with k > 12."""


class DegenerateFamily(VeroneseError):
    """The summing denominator is numerically zero, so no ratio exists."""


class NotLipschitzOnS(VeroneseError):
    """Anchor values violate the requested Lipschitz constant on S."""


class LipschitzExceeded(VeroneseError):
    """The domination inequality fails on some provided pair."""


class PietschInfeasible(VeroneseError):
    """No discrete measure meets the tolerance; carries the minimal violation."""

    def __init__(self, message, violation=None, certificate=None):
        super().__init__(message)
        self.violation = violation
        self.certificate = certificate
