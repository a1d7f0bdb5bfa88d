"""Exception types raised by the lnnd package."""


class LnndError(Exception):
    """Base class for all package-specific errors."""


class DomainError(LnndError, ValueError):
    """An argument lies outside the mathematical domain of a formula.

    Raised instead of silently returning NaN, e.g. when an iterated
    logarithm is undefined or a scaling numerator is nonpositive.
    """


class GeometryError(LnndError, ValueError):
    """A point cloud cannot be processed (fewer than 2 points, duplicates)."""


class QuadratureError(LnndError, ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance.

    Attributes:
        achieved: error estimate actually reached before giving up.
        requested: tolerance that was asked for.
    """

    def __init__(self, message, achieved=None, requested=None):
        super().__init__(message)
        self.achieved = achieved
        self.requested = requested


class ConfigError(LnndError, ValueError):
    """An experiment configuration document is malformed."""
