"""Exception types shared across the library."""


class UcmError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(UcmError):
    """Raised when a .ucm document is syntactically malformed."""

    def __init__(self, message, line, column):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class UnknownNameError(UcmError):
    """A variable, state, event, or gate name does not resolve."""


class AnalysisError(UcmError):
    """An analysis precondition is violated (e.g. a mass-valued event
    where a point probability is required)."""


class ContradictoryEvidenceError(AnalysisError):
    """Evidence assigns zero probability to every joint state."""


class GuardExceededError(UcmError):
    """An enumeration size guard was exceeded."""
