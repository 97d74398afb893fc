"""
Exception hierarchy shared by every dualvote module.
Each class carries the process exit code the CLI reports for it.
"""

from typing import Optional


class DualVoteError(Exception):
    """Base error; anything not classified below is an internal failure"""

    exit_code = 3


class ConfigError(DualVoteError):
    """Invalid configuration or command-line usage"""

    exit_code = 1


class DataError(DualVoteError):
    """Input data violates a precondition of an operation"""

    exit_code = 2


class IngestionError(DataError):
    """A CSV row or cell could not be ingested"""

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None):
        location = []
        if row is not None:
            location.append(f"row {row}")
        if column is not None:
            location.append(f"column '{column}'")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)
        self.row = row
        self.column = column


class DetectorError(DataError):
    """A detector could not be fitted or applied"""

    def __init__(self, message: str, epoch: Optional[int] = None):
        if epoch is not None:
            message = f"{message} at epoch {epoch}"
        super().__init__(message)
        self.epoch = epoch


class FusionError(DataError):
    """Label series or weights cannot be fused"""


class PersistenceError(DataError):
    """A persisted artifact is corrupted or has an unsupported version"""

    def __init__(self, message: str, found: Optional[int] = None, expected: Optional[int] = None):
        if found is not None or expected is not None:
            message = f"{message} (found version {found}, expected {expected})"
        super().__init__(message)
        self.found = found
        self.expected = expected


class StageError(DualVoteError):
    """A pipeline stage failed; wraps the underlying cause"""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"Stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", DualVoteError.exit_code)
