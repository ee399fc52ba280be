"""
Error types for the spectral geometry toolkit.

Every failure the library can signal is a GeometryError (a ValueError, so
callers that only catch ValueError keep working). Each class carries the exit
code the CLI reports for it:

- 2: the input or configuration is invalid
- 3: the numerics or a modelling assumption (non-degeneracy, constant rank,
  smooth matching) broke down
"""


class GeometryError(ValueError):
    """Base class for all toolkit errors."""

    exit_code = 3

    def __init__(self, message, t=None):
        """
        Args:
            message: Human readable description
            t: Optional path parameter (time, beta, field) where the error occurred
        """
        super().__init__(message)
        self.t = t

    def at(self, t):
        """Return a copy of this error tagged with the path parameter t."""
        tagged = type(self)(f"{self.args[0]} (at t={t!r})", t=t)
        return tagged


# === Validation errors (exit 2) ===

class ValidationError(GeometryError):
    exit_code = 2


class NotHermitian(ValidationError):
    pass


class NotPSD(ValidationError):
    pass


class NotUnitary(ValidationError):
    pass


class InvalidState(ValidationError):
    pass


class InvalidStep(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class DimensionTooLarge(ValidationError):
    pass


class RankMismatch(ValidationError):
    pass


class IndexOutOfRange(ValidationError, IndexError):
    pass


class InvalidGrid(ValidationError):
    pass


class ConfigError(ValidationError):
    pass


# === Numerical / assumption failures (exit 3) ===

class NumericalFailure(GeometryError):
    exit_code = 3


class ConvergenceFailure(NumericalFailure):
    pass


class DegenerateSpectrum(NumericalFailure):
    pass


class RankChange(NumericalFailure):
    pass


class AmbiguousMatching(NumericalFailure):
    pass


class VanishingOverlap(NumericalFailure):
    pass
