"""Exception hierarchy shared by every layer of the package."""

from __future__ import annotations

__all__ = [
    "RiskboardError",
    "SchemaError",
    "DomainError",
    "NotFoundError",
    "RevisionConflictError",
]


class RiskboardError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(RiskboardError):
    """A document (knowledge base, model, board, rules, command) failed to parse
    or violates its schema. ``location`` points at the offending element when
    known, e.g. ``"threats[3].stride"``."""

    def __init__(self, message: str, location: str | None = None):
        super().__init__(message if location is None else f"{location}: {message}")
        self.location = location


class DomainError(RiskboardError):
    """An operation violates a precondition or invariant of the methodology
    (wrong column, unscored risk, missing owner, out-of-range factor, ...)."""


class NotFoundError(RiskboardError):
    """A referenced entity (board, card, column, threat, control) does not exist."""


class RevisionConflictError(RiskboardError):
    """Optimistic-concurrency check failed: the board moved on since the client
    read it. Carries the revision the board is actually at."""

    def __init__(self, expected: int, current: int):
        super().__init__(
            f"expected revision {expected} but board is at revision {current}"
        )
        self.expected = expected
        self.current = current
