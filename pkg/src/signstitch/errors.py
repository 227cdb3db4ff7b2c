"""Exception hierarchy shared by every signstitch module."""

from __future__ import annotations


class SignStitchError(Exception):
    """Base class for all errors raised by signstitch."""


class InvalidInputError(SignStitchError, ValueError):
    """An argument violates a documented precondition."""


class DegenerateFrameError(InvalidInputError):
    def __init__(self, frame_index: int, message: str):
        self.frame_index = frame_index
        super().__init__(f"frame {frame_index}: {message}")


class ConfigurationError(SignStitchError, ValueError):
    """Inconsistent processing parameters, e.g. a cutoff above Nyquist."""


class FormatError(SignStitchError):
    """A file or byte stream could not be parsed."""


class SchemaError(FormatError):
    """A file parsed but its content violates the expected schema."""


class DuplicateGlossError(SchemaError):
    def __init__(self, gloss: str):
        self.gloss = gloss
        super().__init__(f"duplicate gloss {gloss!r}")


class UnresolvableGlossError(SignStitchError, LookupError):
    def __init__(self, gloss: str, reason: str, position: int | None = None):
        self.gloss = gloss
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"cannot resolve gloss {gloss!r}{where}: {reason}")

    def __str__(self) -> str:
        return self.args[0]
