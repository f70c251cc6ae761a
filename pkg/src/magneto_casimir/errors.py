"""Exception types raised by the library."""

from __future__ import annotations


class DomainError(ValueError):
    """An argument lies outside the domain where the formula is defined."""


class ConditioningError(ArithmeticError):
    """A boundary-matching system is too close to singular to trust."""

    def __init__(self, message: str, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class ConvergenceError(RuntimeError):
    """A sum or quadrature failed to reach its tolerance."""

    def __init__(self, message: str, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics
