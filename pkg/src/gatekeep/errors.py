"""Exception types shared across the package.

Every error carries a short machine-readable ``code`` next to the human
message so callers (and the CLI) can react without string matching.
"""

from __future__ import annotations


class GatekeepError(Exception):
    """Base class for all errors raised by this package."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class DomainError(GatekeepError):
    """A value violates an operation's precondition or a type invariant."""


class AdjudicationError(GatekeepError):
    """Hierarchy adjudication cannot produce a ledger.

    Codes: ``MISSING_RESULT`` (a level evaluated before any stop lacks an
    outcome) and ``NOT_DETERMINABLE`` (a censored p-value's bound exceeds
    the threshold it must be compared against).
    """

    def __init__(self, code: str, message: str, endpoint_id: str | None = None):
        super().__init__(code, message)
        self.endpoint_id = endpoint_id


class ParseError(GatekeepError):
    """A document cannot be parsed into a domain object.

    Codes: ``SYNTAX``, ``SCHEMA``, ``SEMANTIC``, ``RANGE``.  ``path`` is a
    JSON-pointer-style location for structured documents; ``row`` is the
    1-based row number for tabular ones.
    """

    def __init__(self, code: str, message: str, *, path: str | None = None,
                 row: int | None = None):
        where = ""
        if path is not None:
            where = f" at {path}"
        elif row is not None:
            where = f" at row {row}"
        super().__init__(code, message + where)
        self.path = path
        self.row = row
