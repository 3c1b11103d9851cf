"""Shared exception types."""


class DegmapsError(Exception):
    """Base class for all library errors."""


class NegativeValuation(DegmapsError):
    """Residue of a series with a pole at t = 0 was requested."""


class DegreeMismatch(DegmapsError):
    pass


class BudgetExceeded(DegmapsError):
    """Literal composition would exceed the configured degree budget."""


class InIndeterminacy(DegmapsError):
    """Operation undefined for maps whose constant induced value is a hole."""


class UnsplitFactor(DegmapsError):
    """Query cannot be decided over the Gaussian rationals."""


class NotUnstable(DegmapsError):
    pass


class NonUniqueBadHole(DegmapsError):
    """Two holes carry half the iterate depth; signals an internal inconsistency."""


class NotStable(DegmapsError):
    pass


class TooFewSplitHoles(DegmapsError):
    pass


class ConstantMap(DegmapsError):
    pass


class ConstantLeadingForm(DegmapsError):
    pass


class GenericResidueExhausted(DegmapsError):
    pass


class NTooSmall(DegmapsError):
    """Perturbation verification failed; caller should retry with larger N."""


class ZeroPair(DegmapsError):
    pass


class OrbitNotSplit(DegmapsError):
    pass


class PropertyVerificationFailed(DegmapsError):
    pass


class SelectionInfeasible(DegmapsError):
    pass


class BetaSearchExhausted(DegmapsError):
    pass


class NotApplicable(DegmapsError):
    pass


class MarginExhausted(DegmapsError):
    """Truncated expansion lost exactness before the reduction level."""


class NormalizationFailed(DegmapsError):
    pass
