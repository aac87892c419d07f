"""
Exception types shared by the solver modules.
"""
from typing import Optional


class ChocolateError(Exception):
    """Base class for every error raised by the toolkit."""


class InvalidPositionError(ChocolateError):
    def __init__(self, message: str, invariant: Optional[str] = None):
        super().__init__(message)
        self.invariant = invariant


class ArityError(ChocolateError):
    pass


class UnsupportedDimensionError(ChocolateError):
    pass


class StateSpaceExceeded(ChocolateError):
    pass


class MonotonicityError(ChocolateError):
    pass


class PreconditionError(ChocolateError):
    pass


class OrderingError(ChocolateError):
    pass


class EnumerationCapError(ChocolateError):
    pass
