"""Shared exception types. Exit-code mapping lives in the CLI."""


class LndkitError(Exception):
    """Base class for everything this package raises on purpose."""


class InputError(LndkitError):
    """Malformed user input.

    ``position`` is a best-effort (line, column) pair when the problem came
    from a JSON document, else None.
    """

    def __init__(self, message: str, *, position=None):
        super().__init__(message)
        self.position = position


class RefusalError(LndkitError):
    """A mathematically honest refusal.

    Raised when the requested object provably does not exist or the input
    lies outside the supported theory. ``witness`` carries machine-readable
    evidence (a certificate, counterexample, or reason tag).
    """

    def __init__(self, message: str, *, witness=None):
        super().__init__(message)
        self.witness = witness


class SearchBoundExceeded(LndkitError):
    """An enumeration hit its configured cap before reaching a verdict."""

    def __init__(self, message: str, *, cap=None):
        super().__init__(message)
        self.cap = cap
