"""Exception hierarchy shared by every module."""

from __future__ import annotations


class StableFracError(Exception):
    """Base class for all library errors."""


class Inconclusive(StableFracError):
    """A decision could not be made at the current truncation or precision.

    Callers are expected to retry with a larger truncation order or more
    working digits.
    """


class NumericInconclusive(Inconclusive):
    """A numeric-mode zero test or root classification could not be certified."""


class LiftStall(Inconclusive):
    """Series lifting did not separate branches within the allowed budget."""


class SearchExhausted(StableFracError):
    """No admissible parameter was found within the attempt budget."""


class NotMonicAtOrigin(ValueError, StableFracError):
    """The divisor is not of the form unit * y^M at x = 0."""


class CommonFactor(StableFracError):
    """P and its reflection share a non-constant factor."""


class NotStable(StableFracError):
    """The input polynomial has a zero where it is required to be zero-free."""


class NotStable1D(NotStable):
    """A one-variable polynomial has a root in the closed upper half-plane."""


class ZeroNumerator(ValueError, StableFracError):
    """The numerator (or its derivative) is identically zero."""


class IntegrationFailure(StableFracError):
    """Numerical integration did not reach the requested accuracy."""


class BudgetExhausted(Inconclusive):
    """The numerical integration budget ran out."""


class ExpressionSyntaxError(SyntaxError, StableFracError):
    """Malformed polynomial expression, carrying a 1-based line and column."""

    def __init__(self, message: str, line: int, col: int, text: str = "") -> None:
        super().__init__(f"{message} at line {line}, column {col}")
        self.msg = message
        self.lineno = line
        self.offset = col
        self.line = line
        self.col = col
        self.text = text

    def __str__(self) -> str:
        return f"{self.msg} at line {self.line}, column {self.col}"


class ImproperParameter(ValueError, StableFracError):
    """The pencil parameter t is exceptional (not proper) for the model."""
