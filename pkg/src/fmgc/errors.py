"""Exception hierarchy shared by all fmgc modules.

Every error carries a machine-readable ``code`` so the HTTP layer can
surface it without string matching.
"""

from __future__ import annotations


class FmgcError(Exception):
    """Base class for all domain errors."""

    code = "error"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class ModelParseError(FmgcError):
    code = "parse_error"

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ModelEditError(FmgcError):
    code = "invalid_model_edit"


class UnknownFeatureError(FmgcError):
    code = "unknown_feature"


class UnknownConstraintError(FmgcError):
    code = "unknown_constraint"


class UnknownMemberError(FmgcError):
    code = "unknown_member"


class UnknownItemError(FmgcError):
    code = "unknown_item"


class UnknownVariableError(FmgcError):
    code = "unknown_variable"


class ModelTooLargeError(FmgcError):
    code = "model_too_large"


class VoidModelError(FmgcError):
    """The feature model itself has no valid configuration."""

    code = "void_model"


class MatrixFormatError(FmgcError):
    code = "matrix_format"

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class KindMismatchError(FmgcError):
    code = "kind_mismatch"


class AlreadyRatedError(FmgcError):
    code = "already_rated"


class PhaseError(FmgcError):
    """Operation not allowed in the session's current phase."""

    code = "illegal_phase"


class ConflictStateError(FmgcError):
    """Conflict missing, already resolved, or otherwise unusable."""

    code = "conflict_state"


class UnknownProposalError(FmgcError):
    code = "unknown_proposal"


class ConsistentDecisionsError(FmgcError):
    """Diagnosis requested for a decision set that is already consistent."""

    code = "consistent_decisions"


class StaleReportError(FmgcError):
    """The session changed after the diagnosis report was ranked."""

    code = "stale_report"


class InvalidIndexError(FmgcError):
    code = "invalid_index"


class NotFoundError(FmgcError):
    code = "not_found"


class StorageError(FmgcError):
    code = "storage_error"
