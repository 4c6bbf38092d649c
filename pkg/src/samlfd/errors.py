"""Exception types shared across the package."""


class SamlfdError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(SamlfdError, ValueError):
    """Invalid input: bad shapes, out-of-range parameters, malformed requests."""


class ComputationError(SamlfdError, RuntimeError):
    """A numerical routine failed: divergence, ill-conditioning, or every candidate failing."""


class TrajectoryParseError(ValidationError):
    """A trajectory file could not be parsed."""


class DimensionMismatchError(ValidationError):
    """Dimensions disagree with the declared or expected sample dimension."""


class NonFiniteValueError(ValidationError):
    """Data contains NaN or infinite values."""
