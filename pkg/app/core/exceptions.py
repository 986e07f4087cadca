"""
Domain exceptions shared by the counting library, the CLI and the HTTP layer
"""

from typing import Optional, Sequence, Tuple


class HankelRankError(Exception):
    """Base class for every error raised by the library."""


class ShapeError(HankelRankError, ValueError):
    """Dimension or length mismatch, or a degenerate shape."""


class BudgetExceededError(HankelRankError):
    """An exhaustive computation would need more coefficient bits than allowed."""

    def __init__(self, needed_bits: int, budget: int, what: str = "enumeration"):
        self.needed_bits = needed_bits
        self.budget = budget
        super().__init__(f"{what} needs {needed_bits} bits, budget is {budget}")


class UnsupportedError(HankelRankError):
    """No closed form, recurrence or enumeration path covers the request."""

    def __init__(self, message: str, frontier: Optional[Tuple] = None):
        self.frontier = frontier
        if frontier is not None:
            message = f"{message} (frontier {frontier})"
        super().__init__(message)


class ConsistencyError(HankelRankError, ArithmeticError):
    """A result that must be a nonnegative integer came out otherwise."""


class NotFoundError(HankelRankError, KeyError):
    """Unknown table, count or suite identifier."""

    def __init__(self, what: str, key: str, known: Sequence[str] = ()):
        self.key = key
        self.known = list(known)
        super().__init__(f"unknown {what} {key!r}")

    def __str__(self) -> str:
        return self.args[0]
