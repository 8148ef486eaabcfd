"""Custom exceptions for the quantum-correlation toolkit."""


class QuantumCorrelationError(Exception):
    """Base exception class for quantum-correlation errors.

    Every subclass declares a default ``detail`` message and the process
    ``exit_code`` the command line reports when the error escapes a command.
    """
    exit_code: int = 1
    detail: str = "Quantum correlation error"

    def __init__(
        self,
        detail: str | None = None,
        exit_code: int | None = None,
        magnitude: float | None = None
    ) -> None:
        """Initialize QuantumCorrelationError.

        Args:
            detail: Error detail message. Uses class attribute if None.
            exit_code: CLI exit code. Uses class attribute if None.
            magnitude: Size of the violation that triggered the error, if any.
        """
        self.detail = detail if detail is not None else self.detail
        self.exit_code = exit_code if exit_code is not None else self.exit_code
        self.magnitude = magnitude
        super().__init__(self.detail)


class ValidationError(QuantumCorrelationError):
    """Base class for rejected inputs."""
    exit_code = 2
    detail = "Invalid input"


class NotHermitianError(ValidationError):
    """Exception raised when a matrix deviates from its adjoint."""
    detail = "Matrix is not Hermitian"


class NotUnitTraceError(ValidationError):
    """Exception raised when a density matrix trace differs from one."""
    detail = "Matrix does not have unit trace"


class NotPositiveError(ValidationError):
    """Exception raised when a density matrix has a negative eigenvalue."""
    detail = "Matrix is not positive semidefinite"


class DimensionMismatchError(ValidationError):
    """Exception raised when operand shapes or subsystem dimensions disagree."""
    detail = "Dimension mismatch"


class MissingDimsError(ValidationError):
    """Exception raised when a bipartite operation meets a state without dims."""
    detail = "Density matrix has no bipartite dimensions"


class BadParamLengthError(ValidationError):
    """Exception raised for a parameter vector of the wrong length."""
    detail = "Parameter vector has the wrong length"


class RankDeficientError(ValidationError):
    """Exception raised when a POVM seed matrix lacks full column rank."""
    detail = "POVM seed matrix is rank deficient"


class WrongDimensionError(ValidationError):
    """Exception raised when an operation is restricted to another dimension."""
    detail = "Operation does not support this dimension"


class OutOfRangeError(ValidationError):
    """Exception raised for a parameter outside its allowed range."""
    detail = "Parameter out of range"


class BadRankError(ValidationError):
    """Exception raised for an impossible rank or term count."""
    detail = "Requested rank is not achievable"


class ParseError(ValidationError):
    """Exception raised for malformed density-matrix documents."""
    detail = "Malformed density matrix document"


class UnknownFamilyError(ValidationError):
    """Exception raised for an unrecognised state family name."""
    detail = "Unknown state family"


class NoConvergenceError(QuantumCorrelationError):
    """Exception raised when the eigensolver exhausts its sweep budget."""
    exit_code = 3
    detail = "Eigensolver did not converge"


class InternalConsistencyError(QuantumCorrelationError):
    """Exception raised when a measure lands clearly below zero."""
    exit_code = 1
    detail = "Measure value is negative beyond numerical noise"


__all__ = [
    "QuantumCorrelationError",
    "ValidationError",
    "NotHermitianError",
    "NotUnitTraceError",
    "NotPositiveError",
    "DimensionMismatchError",
    "MissingDimsError",
    "BadParamLengthError",
    "RankDeficientError",
    "WrongDimensionError",
    "OutOfRangeError",
    "BadRankError",
    "ParseError",
    "UnknownFamilyError",
    "NoConvergenceError",
    "InternalConsistencyError",
]
