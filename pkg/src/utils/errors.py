"""
Error Types Module

Exception hierarchy shared by the analytics, data and CLI layers.
The CLI maps FiscalError subclasses to exit status 1 and ConfigError to 2.
"""


class FiscalError(Exception):
    """Base class for all errors raised by the package."""


class FiscalDomainError(FiscalError, ValueError):
    """An input lies outside the domain of an operation."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class NonDifferentiableError(FiscalDomainError):
    """Derivative requested at a kink of the volatility function."""


class NumericError(FiscalError, ArithmeticError):
    """A computation produced a non-finite value or failed to converge."""


class SingularityError(NumericError):
    """A logistic trajectory crosses its pole."""

    def __init__(self, message: str, blow_up_time: float | None = None):
        super().__init__(message)
        self.blow_up_time = blow_up_time


class IngestionError(FiscalError, ValueError):
    """A CSV file could not be turned into an observation table."""

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        location = []
        if row is not None:
            location.append(f"row {row}")
        if column is not None:
            location.append(f"column '{column}'")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)
        self.row = row
        self.column = column


class ConfigError(FiscalError):
    """Invalid run configuration (treated as a usage error)."""
