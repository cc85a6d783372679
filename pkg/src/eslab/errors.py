"""Exception hierarchy.

Every failure raised by the library derives from :class:`EsError`, so the
CLI can map all of them to exit code 1 with one ``except`` clause.
"""

from __future__ import annotations

from typing import Any


class EsError(Exception):
    """Base class for all eslab errors."""

    def __init__(self, message: str = "", witness: Any = None) -> None:
        super().__init__(message)
        self.witness = witness

    @property
    def kind(self) -> str:
        return type(self).__name__


# -- construction / validation ------------------------------------------


class InvalidEventId(EsError):
    pass


class DuplicateEvent(EsError):
    pass


class UnknownEvent(EsError):
    pass


class CycleInCovers(EsError):
    pass


class RedundantCoverEdge(EsError):
    pass


class ConflictBetweenComparable(EsError):
    pass


class XNotInY(EsError):
    pass


class EsSyntaxError(EsError):
    """Malformed ``.es`` or ``.labels`` text, with a 1-based position."""

    def __init__(self, line: int, col: int, message: str) -> None:
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col
        self.detail = message


# -- graph algorithms ------------------------------------------------------


class SizeLimitExceeded(EsError):
    pass


class ExceedsCap(EsError):
    """The chromatic number is larger than the requested cap.

    ``best`` holds the best coloring found (it uses more than ``cap`` colors).
    """

    def __init__(self, message: str, best: Any = None) -> None:
        super().__init__(message, witness=best)
        self.best = best


class NotAnAntichain(EsError):
    pass


class BadOrder(EsError):
    pass


# -- domain ------------------------------------------------------------------


class DomainTooLarge(EsError):
    def __init__(self, message: str, count: int) -> None:
        super().__init__(message, witness=count)
        self.count = count


class UnlabelledEvent(EsError):
    pass


# -- labelling ---------------------------------------------------------------


class NotStratifying(EsError):
    pass


class LevelNeedsMoreThanThreeColors(EsError):
    pass


class NotATree(EsError):
    pass


class NotAForest(EsError):
    pass


class IncomparableTwinOSets(EsError):
    pass


class DegreeExceedsThree(EsError):
    pass


class TheoremViolation(EsError):
    """A claim that must hold for valid degree-3 inputs failed at runtime."""


class ClassNotThreeLabellable(EsError):
    pass


class BadQuotientColoring(EsError):
    pass


class NotSimple(EsError):
    def __init__(self, condition: str, witness: Any = None) -> None:
        super().__init__(f"{condition} condition fails at {witness!r}", witness=witness)
        self.condition = condition


# -- generators ----------------------------------------------------------------


class GenerationFailed(EsError):
    pass


class UnknownFixture(EsError):
    pass
