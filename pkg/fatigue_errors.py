"""
Error types shared by the fatigue model, the MET bank, the reference models
and the validation study.

The CLI maps every ``FatigueModelError`` to exit code 2; the HTTP service maps
them to 422 (404 for unknown models).
"""

from typing import Optional


class FatigueModelError(Exception):
    """Base exception for all muscle-fatigue computations."""

    pass


class OutOfRangeError(FatigueModelError, ValueError):
    """A time argument lies outside the load profile."""

    pass


class DomainError(FatigueModelError, ValueError):
    """An argument lies outside the mathematical domain of a formula."""

    def __init__(self, message: str, boundary: Optional[float] = None):
        super().__init__(message)
        self.boundary = boundary


class SaturationError(FatigueModelError, OverflowError):
    """An exponential in the fatigue model left the representable double range."""

    pass


class IntegrationError(FatigueModelError, ArithmeticError):
    """The ODE vector field produced a non-finite or malformed derivative."""

    def __init__(self, message: str, t: float):
        super().__init__(f"{message} (t={t!r})")
        self.t = t


class UndefinedStatisticError(FatigueModelError, ValueError):
    """Correlation statistic undefined (zero variance)."""

    pass


class GridMismatchError(FatigueModelError, ValueError):
    pass


class DegenerateClosedFormError(FatigueModelError, ValueError):
    """Liu closed form has beta == 1 + gamma; use the ODE path instead."""

    pass


class UnknownModelError(FatigueModelError, ValueError):
    pass


class ProfileParseError(FatigueModelError, ValueError):
    """Malformed load-profile file. ``row`` is the 1-based file line."""

    def __init__(self, message: str, row: Optional[int] = None):
        text = f"row {row}: {message}" if row is not None else message
        super().__init__(text)
        self.row = row
