"""
QFuzz Sentiment - Error Types
=============================

Every error raised by the library derives from QfuzzError and carries a
stable machine-readable code. The CLI and the API render errors with the
same shape:

    {"success": false, "error": <code>, "message": <text>, "details": {...}}
"""

from typing import Any, Dict, Optional


class QfuzzError(Exception):
    """Base class for library errors."""

    code: str = "qfuzz-error"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        """Render the error in the shared error-response shape."""
        return {
            "success": False,
            "error": self.code,
            "message": self.message,
            "details": self.details or None,
        }


class UnknownLabelError(QfuzzError, ValueError):
    code = "unknown-label"


class UnknownLabelValueError(QfuzzError, ValueError):
    code = "unknown-label-value"


class InvalidAngleError(QfuzzError, ValueError):
    code = "non-finite-input"


class QubitIndexError(QfuzzError, IndexError):
    code = "index-out-of-range"


class ArityMismatchError(QfuzzError, ValueError):
    code = "arity-mismatch"


class ProbabilityRangeError(QfuzzError, ValueError):
    code = "p-out-of-range"


class LengthMismatchError(QfuzzError, ValueError):
    code = "length-mismatch"


class EmptyInputError(QfuzzError, ValueError):
    """Raised for empty token lists, datasets, counts and cleaned texts."""

    code = "empty-input"

    def __init__(self, message: str, code: Optional[str] = None,
                 details: Optional[Dict[str, Any]] = None):
        super().__init__(message, details)
        if code is not None:
            self.code = code


class ZeroActivationError(QfuzzError, ValueError):
    code = "all-zero-activation"


class ZeroMembershipError(QfuzzError, ValueError):
    code = "zero-total-membership"


class NonRotationParameterError(QfuzzError, ValueError):
    code = "non-rotation-parameter"


class SingleClassError(QfuzzError, ValueError):
    code = "single-class-input"

    def __init__(self, message: str, code: Optional[str] = None,
                 details: Optional[Dict[str, Any]] = None):
        super().__init__(message, details)
        if code is not None:
            self.code = code


class NonBinaryLabelError(QfuzzError, ValueError):
    code = "non-binary-labels"


class SchemaMismatchError(QfuzzError, ValueError):
    code = "schema-mismatch"


class UnsupportedModelError(QfuzzError, ValueError):
    code = "unsupported-model"


class MissingFuzzyLayerError(QfuzzError, ValueError):
    code = "missing-fuzzy-layer"


class InvalidArgumentError(QfuzzError, ValueError):
    code = "invalid-args"


class CheckpointFormatError(QfuzzError, ValueError):
    code = "checkpoint-format"


class DatasetIOError(QfuzzError, OSError):
    code = "io-error"
