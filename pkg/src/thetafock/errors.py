"""Exception types raised by thetafock."""


class ThetaFockError(Exception):
    """Base class for library errors."""


class DimensionError(ThetaFockError, ValueError):
    """A point or multi-index does not match the configured dimension."""


class DomainError(ThetaFockError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigError(ThetaFockError, ValueError):
    """A configuration object or file is invalid."""


class UnreachableToleranceError(ThetaFockError):
    """A requested series tolerance cannot be certified."""


class TruncationError(ThetaFockError, ValueError):
    """A truncation order is too small for the tail bound to apply."""


class BasisOverflowError(ThetaFockError, OverflowError):
    """A direct evaluation overflows; use the log-space companion instead."""


class CalibrationError(ThetaFockError):
    """The theta closed form of the kernel disagrees with the basis series."""


class QuadratureError(ThetaFockError, FloatingPointError):
    """A sampled integrand produced a non-finite value."""


class DegenerateInputError(ThetaFockError, ValueError):
    """The input carries no information (for example an all-zero expansion)."""
