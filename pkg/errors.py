"""
Error types shared by the analytic engine, the simulator and the CLI.
"""

from typing import Optional


class OutageError(Exception):
    """Base class for every error raised by this package."""


class DomainError(OutageError, ValueError):
    """An argument lies outside the domain of the operation."""


class NumericError(OutageError, ArithmeticError):
    """
    A numerical procedure failed to converge or exceeded its evaluation limit.

    Args:
        message: Human readable description
        best_estimate: Best value available when the procedure gave up
    """

    def __init__(self, message: str, best_estimate: Optional[float] = None):
        super().__init__(message)
        self.best_estimate = best_estimate


class SingularSystemError(NumericError):
    """The MMSE interference-plus-noise matrix is numerically singular."""


class ConfigError(OutageError, ValueError):
    """
    A run configuration or model description is invalid.

    Args:
        message: Human readable description
        field: Dotted path of the offending field, e.g. "model.members[1].rho"
        line: Line in the JSON document (decoder errors only)
        column: Column in the JSON document (decoder errors only)
    """

    def __init__(self, message: str, field: Optional[str] = None,
                 line: Optional[int] = None, column: Optional[int] = None):
        self.message = message
        self.field = field
        self.line = line
        self.column = column
        location = []
        if field:
            location.append(f"field '{field}'")
        if line is not None:
            location.append(f"line {line}, column {column}")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)


class WindowError(ConfigError):
    """The simulation window cannot be validated for the model."""
