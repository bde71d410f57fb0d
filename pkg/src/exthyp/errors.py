"""Exception hierarchy shared across the library."""


class ExtHypError(Exception):
    """Base class for all library-specific errors."""


class DimensionError(ExtHypError):
    """Coordinates or operands disagree with the declared dimension."""


class GeometryError(ExtHypError):
    """Invalid model point, non-Lorentz matrix, or unsupported isometry action."""


class SingularEvaluationError(ExtHypError):
    """A density was evaluated on, or too close to, its singular set."""


class ContourError(ExtHypError):
    """Malformed contour, oversized detour, or branch-tracking failure."""


class QuadratureError(ExtHypError):
    """Non-finite integrand values or invalid integration limits."""


class DomainError(ExtHypError):
    """Domain parameters violate the family's constraints."""


class ConfigError(ExtHypError):
    """Malformed experiment configuration."""
