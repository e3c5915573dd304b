"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class FreudError(Exception):
    """Base class for every error raised by this package."""


class DomainError(FreudError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class PreconditionError(FreudError, ValueError):
    """A documented precondition on the inputs does not hold."""


class SingularityError(DomainError):
    """Evaluation requested at a pole (x = 0 for the potential, a root of A_n, ...)."""


class PrecisionError(FreudError, ArithmeticError):
    """Working precision was exhausted before a stable result was reached.

    ``index`` names the failing step (e.g. the polynomial degree) and
    ``required_digits`` is a suggested working precision for a retry.
    """

    def __init__(self, message: str, index: int | None = None, required_digits: int | None = None):
        super().__init__(message)
        self.index = index
        self.required_digits = required_digits


class AccuracyError(FreudError, ArithmeticError):
    """A numerical method did not reach its tolerance; ``achieved`` holds the error estimate."""

    def __init__(self, message: str, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class InstabilityError(FreudError, ArithmeticError):
    """Forward recursion produced an inadmissible value (vanishing pivot, negative gamma)."""

    def __init__(self, message: str, index: int, partial=None):
        super().__init__(message)
        self.index = index
        self.partial = partial
