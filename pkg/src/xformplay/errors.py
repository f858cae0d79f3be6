"""Typed error hierarchy shared by the engine, the file formats and the service.

Every error carries a short stable ``code`` so the CLI and the wire protocol
can report failures without string-matching messages. ``sequence_no`` is
filled in by replay when an error surfaces mid-log.
"""

from __future__ import annotations


class XformError(Exception):
    """Base class for all domain errors."""

    code = "E_GENERIC"

    def __init__(self, message: str, sequence_no: int | None = None):
        super().__init__(message)
        self.sequence_no = sequence_no


# -- numeric core -------------------------------------------------------------

class InvalidParameterError(XformError):
    """Non-finite or out-of-range parameter passed to a constructor."""

    code = "E_PARAM"


class UnsupportedMatrixError(XformError):
    """Matrix lacks the affine bottom row (0, 0, 0, 1)."""

    code = "E_MATRIX"


class SingularMatrixError(XformError):
    code = "E_SINGULAR"


class DecompositionError(XformError):
    """Matrix is not a translation-rotation-uniform-scale product."""

    code = "E_DECOMPOSE"


class ReflectionError(DecompositionError):
    """Upper 3x3 determinant is zero or negative (reflection or singular)."""

    code = "E_REFLECTION"


class ShearError(DecompositionError):
    """Upper 3x3 is not orthogonal after scale removal (shear or non-uniform scale)."""

    code = "E_SHEAR"


class InvalidRotationError(XformError):
    code = "E_ROTATION"


class DegenerateConfigurationError(XformError):
    """Point set too degenerate (collinear) to pin down an alignment."""

    code = "E_DEGENERATE"


class AlreadyAlignedError(XformError):
    """Hint requested while the poses already match within tolerance."""

    code = "E_ALIGNED"


# -- game engine --------------------------------------------------------------

class InvalidSpecError(XformError):
    code = "E_SPEC"


class IllegalMoveError(XformError):
    code = "E_MOVE"


class SessionFinishedError(XformError):
    code = "E_FINISHED"


class NoActiveStepError(XformError):
    code = "E_NO_STEP"


class InvalidFieldError(XformError):
    code = "E_FIELD"


class NothingToUndoError(XformError):
    code = "E_UNDO"


# -- persistence --------------------------------------------------------------

class CorruptLogError(XformError):
    """Event log fails contiguity or parse checks.

    ``line`` is the 1-based record number within the event section.
    """

    code = "E_LOG"

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line


class VersionMismatchError(XformError):
    code = "E_VERSION"


class MalformedDocumentError(XformError):
    code = "E_FORMAT"
