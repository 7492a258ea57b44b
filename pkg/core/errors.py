"""
errors.py

Exception hierarchy shared by every sclkit package.

Two families map onto the CLI exit-code contract: problems with the
user's input (exit 2) and mathematically undefined quantities (exit 3).
"""


class SclkitError(Exception):
    """Base class for all sclkit errors."""
    pass


class SpecValidationError(SclkitError):
    """Input violates a documented precondition."""
    pass


class MathError(SclkitError):
    """A requested quantity is undefined for the given model and data."""
    pass


# --- input errors -----------------------------------------------------------

class AlphabetMismatchError(SpecValidationError):
    """Two distributions (or a distribution and a space) disagree on symbols."""
    pass


class InvalidDistributionError(SpecValidationError):
    """Probabilities are negative, NaN, or do not sum to one."""
    pass


class InvalidWeightsError(SpecValidationError):
    """A weight vector or matrix column is off the simplex."""
    pass


class WeightDimensionMismatchError(SpecValidationError):
    """Weight count differs from feature count."""
    pass


class DimensionMismatchError(SpecValidationError):
    """Matrix shapes do not agree."""
    pass


class SymbolNotInAlphabetError(SpecValidationError):
    """An observed symbol is not in the feature alphabet."""
    pass


class MissingObservationError(SpecValidationError):
    """No value observed for a feature that is being evaluated."""
    pass


class MissingConditionerError(SpecValidationError):
    """A conditional feature was evaluated without its conditioning symbol."""
    pass


class MissingNuisanceError(SpecValidationError):
    """A parametric feature was evaluated without a nuisance index."""
    pass


class IndexOutOfRangeError(SpecValidationError):
    """A hypothesis, feature or grid index is outside its range."""
    pass


class UnsupportedModelError(SpecValidationError):
    """The operation is not defined for this kind of feature model or oracle."""
    pass


class CapExceededError(SpecValidationError):
    """Problem size exceeds the exact-enumeration caps."""
    pass


class EmptySampleError(SpecValidationError):
    """An average over an empty sample was requested."""
    pass


# --- undefined quantities ---------------------------------------------------

class AllZeroMassError(MathError):
    """Every hypothesis (or grid point) carries zero mass."""
    pass


class IndeterminateRatioError(MathError):
    """A likelihood ratio of the form 0/0 (or inf - inf) with positive weight."""
    pass


class ReferencePriorZeroError(MathError):
    """The reference hypothesis has zero prior probability."""
    pass


class ReferenceLikelihoodZeroError(MathError):
    """The reference hypothesis assigns zero probability to the data."""
    pass


class ReferenceEvidenceZeroError(MathError):
    """The composite evidence of the reference hypothesis vanishes."""
    pass


class ZeroMarginalDataError(MathError):
    """The data has zero probability under the prior mixture."""
    pass


class EmptyConditioningSetError(MathError):
    """The conditioning slice of a conditional feature has zero probability."""
    pass
