"""Exception hierarchy for sel."""

from __future__ import annotations

from typing import Any


class SelError(Exception):
    pass


class LayoutError(SelError, ValueError):
    pass


class RankError(SelError, ValueError):
    pass


class DomainError(SelError, ValueError):
    pass


class ChannelError(SelError, ValueError):
    pass


class ArgumentError(SelError, ValueError):
    pass


class SupportError(SelError, ValueError):
    pass


class ClassicalityError(SelError, ValueError):
    pass


class CommutationError(SelError, ValueError):
    pass


class StateFileError(SelError, ValueError):
    pass


class SolverError(SelError, RuntimeError):
    """An SDP solve ended without an optimal certificate."""

    def __init__(self, message: str, solution: Any = None):
        super().__init__(message)
        self.solution = solution


class ValidityError(SelError):
    """A finite-blocklength bound was requested outside its validity range."""

    def __init__(self, message: str, threshold: float):
        super().__init__(message)
        self.threshold = threshold
