"""Exception types shared across the package."""


class CapacityLabError(Exception):
    """Base class for all package errors."""


class CapacityLimitError(CapacityLabError):
    """A state space or search would exceed the configured work limit."""

    def __init__(self, message, estimate=None, limit=None):
        super().__init__(message)
        self.estimate = estimate
        self.limit = limit


class FormatError(CapacityLabError):
    """A file could not be parsed; carries a line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class CheckpointError(CapacityLabError):
    """A checkpoint file is corrupt or belongs to a different operator."""
