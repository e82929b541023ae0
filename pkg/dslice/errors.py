"""
Error types and standardized error responses for dslice.

Every failure raised by the library is a DsliceError carrying a
machine-readable ErrorCode, so the CLI can map it to an exit code and a
structured response without string matching.
"""

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class ErrorCode(str, Enum):
    """Standard error codes for library and CLI failures."""

    # Input errors
    INVALID_SEIFERT = "INVALID_SEIFERT"
    NOT_PRIME_POWER = "NOT_PRIME_POWER"
    DIMENSION_MISMATCH = "DIMENSION_MISMATCH"
    ZERO_POLYNOMIAL = "ZERO_POLYNOMIAL"
    INVALID_ALEXANDER = "INVALID_ALEXANDER"
    BAD_FRACTION = "BAD_FRACTION"
    ELEMENT_OUT_OF_RANGE = "ELEMENT_OUT_OF_RANGE"
    MALFORMED_RECORD = "MALFORMED_RECORD"
    MISMATCHED_COVER = "MISMATCHED_COVER"
    UNKNOWN_KNOT = "UNKNOWN_KNOT"
    INVALID_EXPRESSION = "INVALID_EXPRESSION"
    NOT_ENOUGH_SUMMANDS = "NOT_ENOUGH_SUMMANDS"

    # Arithmetic
    SINGULAR_MATRIX = "SINGULAR_MATRIX"

    # Resource limits
    GROUP_TOO_LARGE = "GROUP_TOO_LARGE"

    # Internal
    DEGENERATE_COVER = "DEGENERATE_COVER"
    INTERNAL_CONSISTENCY = "INTERNAL_CONSISTENCY"


class ErrorDetail(BaseModel):
    """Detailed error information for a specific field or record."""

    field: Optional[str] = Field(None, description="Field or record that caused the error")
    message: str = Field(..., description="Human-readable error message")
    code: Optional[str] = Field(None, description="Machine-readable error code")


class ErrorResponse(BaseModel):
    """Structured error printed by the CLI in json mode."""

    success: bool = Field(False, description="Always false for error responses")
    error: str = Field(..., description="Error code (machine-readable)")
    message: str = Field(..., description="Human-readable error message")
    details: Optional[List[ErrorDetail]] = Field(None, description="Additional error details")
    command: Optional[str] = Field(None, description="CLI subcommand where the error occurred")


class DsliceError(Exception):
    """Base class for all dslice failures."""

    code: ErrorCode = ErrorCode.INTERNAL_CONSISTENCY

    def __init__(self, message: str, details: Optional[List[ErrorDetail]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or []

    def to_response(self, command: Optional[str] = None) -> Dict[str, Any]:
        return create_error_response(self.code, self.message, details=self.details or None, command=command)


class InvalidSeifertError(DsliceError):
    code = ErrorCode.INVALID_SEIFERT


class NotPrimePowerError(DsliceError):
    code = ErrorCode.NOT_PRIME_POWER


class DimensionMismatchError(DsliceError):
    code = ErrorCode.DIMENSION_MISMATCH


class ZeroPolynomialError(DsliceError):
    code = ErrorCode.ZERO_POLYNOMIAL


class InvalidAlexanderError(DsliceError):
    code = ErrorCode.INVALID_ALEXANDER


class BadFractionError(DsliceError):
    code = ErrorCode.BAD_FRACTION


class ElementOutOfRangeError(DsliceError):
    code = ErrorCode.ELEMENT_OUT_OF_RANGE


class MalformedRecordError(DsliceError):
    code = ErrorCode.MALFORMED_RECORD


class MismatchedCoverError(DsliceError):
    code = ErrorCode.MISMATCHED_COVER


class UnknownKnotError(DsliceError):
    code = ErrorCode.UNKNOWN_KNOT


class InvalidExpressionError(DsliceError):
    code = ErrorCode.INVALID_EXPRESSION


class NotEnoughSummandsError(DsliceError):
    code = ErrorCode.NOT_ENOUGH_SUMMANDS


class SingularMatrixError(DsliceError):
    code = ErrorCode.SINGULAR_MATRIX


class GroupTooLargeError(DsliceError):
    code = ErrorCode.GROUP_TOO_LARGE


class DegenerateCoverError(DsliceError):
    code = ErrorCode.DEGENERATE_COVER


class ConsistencyError(DsliceError):
    """An internal invariant failed; the computation is not trustworthy."""

    code = ErrorCode.INTERNAL_CONSISTENCY


def create_error_response(
    error_code: ErrorCode,
    message: str,
    details: Optional[List[ErrorDetail]] = None,
    command: Optional[str] = None,
) -> Dict[str, Any]:
    """
    Create a standardized error response.

    Args:
        error_code: Machine-readable error code
        message: Human-readable error message
        details: Optional list of detailed error information
        command: CLI subcommand that failed

    Returns:
        Dictionary formatted as ErrorResponse

    Example:
        >>> create_error_response(ErrorCode.UNKNOWN_KNOT, "Knot 'K9' not defined", command="check")["error"]
        'UNKNOWN_KNOT'
    """
    response = ErrorResponse(error=error_code.value, message=message, details=details, command=command)
    return response.model_dump()
