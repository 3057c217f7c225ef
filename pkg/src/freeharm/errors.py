"""Exception hierarchy shared by every freeharm module."""

from __future__ import annotations


class FreeharmError(Exception):
    """Base class for all library errors."""


class InvalidLetterError(FreeharmError, ValueError):
    def __init__(self, letter, d=None, position=None):
        self.letter = letter
        self.d = d
        self.position = position
        where = f" at position {position}" if position is not None else ""
        bound = f" (rank d={d})" if d is not None else ""
        super().__init__(f"invalid letter {letter!r}{where}{bound}")


class DomainError(FreeharmError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ShapeError(FreeharmError, ValueError):
    """A function is not sphere-constant where a radial function is required."""

    def __init__(self, message, sphere=None):
        self.sphere = sphere
        super().__init__(message)


class PreconditionError(FreeharmError, ValueError):
    """A support hypothesis was violated; ``word`` names the offender."""

    def __init__(self, message, word=None):
        self.word = word
        super().__init__(message)


class ResourceCapError(FreeharmError, RuntimeError):
    """Estimated work or memory exceeds the configured cap."""
