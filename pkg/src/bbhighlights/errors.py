"""Exception hierarchy.

Every error carries an ``exit_code`` so the CLI can map failures without
special-casing each type: 1 for input/config problems, 2 for backend
problems, 3 for internal invariant failures.
"""

from __future__ import annotations


class HighlightError(Exception):
    exit_code = 1


class MalformedRecord(HighlightError):
    def __init__(self, index: int, message: str):
        self.index = index
        super().__init__(f"record {index}: {message}")


class DuplicatePlayId(HighlightError):
    def __init__(self, play_id: int, index: int):
        self.play_id = play_id
        self.index = index
        super().__init__(f"duplicate play id {play_id} at record {index}")


class EmptyLog(HighlightError):
    pass


class UnknownPlayId(HighlightError):
    def __init__(self, play_id: int):
        self.play_id = play_id
        super().__init__(f"unknown play id {play_id}")


class EmptyCorpus(HighlightError):
    def __init__(self, message: str = "empty corpus"):
        super().__init__(message)


class IncompleteGame(HighlightError):
    pass


class ChainBreak(HighlightError):
    exit_code = 3


class ZeroDenominator(HighlightError):
    exit_code = 3


class MissingTemplate(HighlightError):
    pass


class UnresolvedPlaceholder(HighlightError):
    def __init__(self, names):
        self.names = tuple(sorted(names))
        super().__init__("unresolved placeholder(s): " + ", ".join(self.names))


class BackendUnavailable(HighlightError):
    exit_code = 2


class SchemaViolation(HighlightError):
    exit_code = 2

    def __init__(self, message: str, missing=(), extra=(), field: str | None = None):
        self.missing = frozenset(missing)
        self.extra = frozenset(extra)
        self.field = field
        super().__init__(message)


class EmptyGroundTruth(HighlightError):
    pass


class ConfigError(HighlightError):
    pass
