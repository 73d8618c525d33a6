"""
Exceptions Module
Error hierarchy shared by the numerical modules and the command line.
"""


class QCalculusError(Exception):
    """Base class for all library errors."""


class InvalidArgument(QCalculusError, ValueError):
    """A parameter violates its documented constraints."""


class NumericalError(QCalculusError, ArithmeticError):
    """A computation could not produce a trustworthy value."""


class DomainError(NumericalError):
    """The evaluation point lies outside the region where the series converges."""


class NonConvergence(NumericalError):
    """The term budget ran out before the truncation criterion was met."""

    def __init__(self, message: str, terms_used: int = 0, tail_estimate: float = float("inf")):
        super().__init__(message)
        self.terms_used = terms_used
        self.tail_estimate = tail_estimate


class PoleError(NumericalError):
    """A gamma-type function was evaluated at one of its poles."""


class DivisionByZero(NumericalError, ZeroDivisionError):
    """A denominator product vanished."""
