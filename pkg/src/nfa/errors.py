"""Exception hierarchy shared across the package.

Every error raised by the library derives from :class:`NfaError` so callers
can catch one type at the boundary.  The CLI maps subclasses onto its exit
code scheme (1 usage/IO, 2 validation, 3 numeric failure).
"""

from __future__ import annotations


class NfaError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(NfaError):
    """Factor schema is malformed, or data does not match the schema."""


class DomainError(NfaError):
    """A numeric input is outside its admissible range."""


class InferenceError(NfaError):
    """Fuzzy inference could not produce a result (zero total activation)."""


class RuleError(NfaError):
    """A dependency rule set contains violations and cannot be applied."""


class CapabilityError(NfaError):
    """A registered estimation back-end lacks a required capability."""


class FitError(NfaError):
    """Baseline coefficient fitting is degenerate for the given records."""


class TrainingError(NfaError):
    """Training preconditions violated (empty data, all-zero weights)."""


class TrainingDivergedError(NfaError):
    """Training aborted on a non-finite loss or gradient."""

    def __init__(self, message: str, epoch: int, record_id: str | None = None):
        super().__init__(message)
        self.epoch = epoch
        self.record_id = record_id


class ParseError(NfaError):
    """A dataset file could not be parsed; carries line and column context."""

    def __init__(self, message: str, line: int | None = None, column: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column!r}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(message + suffix)
        self.line = line
        self.column = column


class DocumentError(NfaError):
    """A parameter document failed validation; names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class StageError(NfaError):
    """Wraps an error raised inside one stage of the estimation pipeline."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause
