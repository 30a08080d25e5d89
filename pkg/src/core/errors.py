"""
Exception types and process exit codes.
"""
from enum import IntEnum


class ExitStatus(IntEnum):
    """Process exit codes of the command-line front end."""

    SUCCESS = 0
    USAGE_ERROR = 1
    NUMERICAL_FAILURE = 2
    MANIFEST_FAILED = 3
    INTERNAL_ERROR = 4


class NumericalFailure(RuntimeError):
    """Eigensolver non-convergence, non-finite propagators or zero-norm states."""


class DefectiveDecompositionError(NumericalFailure):
    """Raised when a decomposition is too ill-conditioned for modal propagation."""
