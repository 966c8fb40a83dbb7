"""Exception hierarchy shared by every module."""

from __future__ import annotations


class CorrSketchError(Exception):
    """Base class for all errors raised by corrsketch."""


class ParameterError(CorrSketchError, ValueError):
    pass


class FormatError(CorrSketchError, ValueError):
    pass


class BoundsError(CorrSketchError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line


class LengthMismatchError(CorrSketchError, ValueError):
    pass


class EmptyStreamError(CorrSketchError, ValueError):
    pass


class MergeError(CorrSketchError, ValueError):
    pass


class UndefinedReferenceError(CorrSketchError, ValueError):
    pass


class ConfigurationError(CorrSketchError):
    pass


class StreamConsumedError(CorrSketchError, RuntimeError):
    """Raised when a single-pass source is iterated a second time."""


class WriteError(CorrSketchError, OSError):
    pass
