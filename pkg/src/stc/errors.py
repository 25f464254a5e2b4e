"""Exception hierarchy shared across the package."""


class STCError(Exception):
    """Base class for all errors raised by this package."""


class InputError(STCError):
    """An argument refers to unknown vertices or violates an API precondition."""


class RewriteError(STCError):
    """A graph rewrite was attempted with a violated precondition."""


class ParseError(STCError):
    """A document failed to parse; carries the offending position."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{where}: {message}"
        super().__init__(message)


class SemanticError(STCError):
    """The input parsed but is semantically unusable (e.g. tree leaves missing from the network)."""


class OracleTooLargeError(STCError):
    """The brute-force oracle was asked to process an instance above its cap."""


class InternalError(STCError):
    """An internal invariant was violated; indicates a bug, never a user error."""
