"""Exception hierarchy shared by every module (and mapped to CLI exit codes)."""

from __future__ import annotations

__all__ = [
    "EntangleLabError",
    "ParseError",
    "PreconditionError",
    "DimensionTooLarge",
    "UnsupportedCase",
    "CrossCheckError",
]


class EntangleLabError(Exception):
    """Base class."""

    exit_code = 1


class ParseError(EntangleLabError, ValueError):
    exit_code = 2

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class PreconditionError(EntangleLabError, ValueError):
    exit_code = 3


class DimensionTooLarge(PreconditionError):
    pass


class UnsupportedCase(PreconditionError):
    """Symbolic rewrite requested where no closed-form rule applies."""


class CrossCheckError(EntangleLabError, RuntimeError):
    """Two independent computations disagreed; always a bug trap."""

    exit_code = 4
