"""Exception types shared across the package."""


class ElagpError(Exception):
    """Base class for package errors."""


class ExpressionParseError(ElagpError):
    """Serialized expression text cannot be parsed back into a tree."""


class ResamplingExhausted(ElagpError):
    """Too many consecutive invalid draws from the random function generator."""


class UnknownFunction(ElagpError):
    """Benchmark function id outside 1..24."""


class DimensionUnsupported(ElagpError):
    """Requested dimensionality is not supported by this operation."""


class DegenerateObjective(ElagpError):
    """Objective vector is constant; min-max normalization undefined."""


class FeatureFailure(ElagpError):
    """A single landscape feature could not be computed."""

    def __init__(self, name, reason=""):
        self.name = name
        super().__init__(f"feature {name!r} failed: {reason}" if reason else name)


class ElaComputationFailed(ElagpError):
    """An entire feature replicate (or all of them) failed."""


class EmptySample(ElagpError):
    """Empirical distribution with no values."""


class InvalidDistance(ElagpError):
    """Fitness undefined because a retained feature is missing."""


class UndefinedDistance(ElagpError):
    """Vector distance undefined (zero-norm input for cosine/correlation)."""
