"""Exception types shared across the package."""

from __future__ import annotations


class ClauseGraphError(Exception):
    """Base class for every error raised by clausegraph."""


class NotFound(ClauseGraphError, FileNotFoundError):
    pass


class ParseError(ClauseGraphError):
    def __init__(self, message: str, file: str | None = None, line: int | None = None):
        self.file = file
        self.line = line
        where = ""
        if file is not None:
            where = f"{file}:{line}: " if line is not None else f"{file}: "
        super().__init__(f"{where}{message}")


class ValidationError(ClauseGraphError):
    def __init__(self, message: str, diagnostics: list | None = None):
        self.diagnostics = list(diagnostics or [])
        super().__init__(message)


class SchemaVersionError(ClauseGraphError):
    pass


class ExtractorUnavailable(ClauseGraphError):
    pass


# graph errors


class GraphError(ClauseGraphError):
    pass


class DuplicateNode(GraphError):
    pass


class MissingNode(GraphError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its argument
        return Exception.__str__(self)


class SelfLoop(GraphError):
    pass


class CycleError(GraphError):
    pass


class TemporalOrderError(GraphError):
    pass


class FrozenGraphError(GraphError):
    pass


class UnresolvedTarget(GraphError):
    pass


class DeletedClause(GraphError):
    """The valid version of a clause is a tombstone."""

    def __init__(self, message: str, tombstone: str, base: str):
        self.tombstone = tombstone
        self.base = base
        super().__init__(message)


# evaluation / query errors


class UnresolvedEntry(ClauseGraphError):
    pass


class EmptyQuery(ClauseGraphError):
    pass
