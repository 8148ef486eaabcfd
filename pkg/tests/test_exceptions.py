"""Unit tests for custom quantum-correlation exceptions."""

import pytest

from qcorr import exceptions
from qcorr.exceptions import (
    InternalConsistencyError,
    NoConvergenceError,
    NotHermitianError,
    OutOfRangeError,
    ParseError,
    QuantumCorrelationError,
    ValidationError,
)


class TestQuantumCorrelationError:
    """Test cases for the base QuantumCorrelationError class."""

    def test_default_initialization(self) -> None:
        """Test QuantumCorrelationError with default values."""
        exc = QuantumCorrelationError()
        assert exc.exit_code == 1
        assert exc.detail == "Quantum correlation error"
        assert exc.magnitude is None
        assert str(exc) == "Quantum correlation error"

    def test_custom_detail_initialization(self) -> None:
        custom_detail = "Custom error message"
        exc = QuantumCorrelationError(detail=custom_detail)
        assert exc.exit_code == 1
        assert exc.detail == custom_detail
        assert str(exc) == custom_detail

    def test_full_custom_initialization(self) -> None:
        exc = QuantumCorrelationError(detail="Custom error", exit_code=4, magnitude=0.25)
        assert exc.exit_code == 4
        assert exc.detail == "Custom error"
        assert exc.magnitude == 0.25

    def test_instance_override_leaves_class_untouched(self) -> None:
        QuantumCorrelationError(detail="Other", exit_code=9)
        assert QuantumCorrelationError.exit_code == 1
        assert QuantumCorrelationError.detail == "Quantum correlation error"


class TestValidationErrors:
    """Test cases for the input validation family."""

    @pytest.mark.parametrize("name", [
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
    ])
    def test_exit_code_and_inheritance(self, name) -> None:
        exc_class = getattr(exceptions, name)
        exc = exc_class()
        assert isinstance(exc, ValidationError)
        assert isinstance(exc, QuantumCorrelationError)
        assert exc.exit_code == 2
        assert exc.detail == exc_class.detail

    def test_magnitude_is_carried(self) -> None:
        exc = NotHermitianError(detail="Matrix deviates from its adjoint by 0.1", magnitude=0.1)
        assert exc.magnitude == 0.1
        assert exc.exit_code == 2

    def test_class_attributes(self) -> None:
        assert OutOfRangeError.detail == "Parameter out of range"
        assert ParseError.detail == "Malformed density matrix document"

    def test_raise_and_catch_as_base(self) -> None:
        with pytest.raises(QuantumCorrelationError) as exc_info:
            raise OutOfRangeError(detail="p must lie in [0, 1]", magnitude=1.5)
        assert exc_info.value.exit_code == 2
        assert exc_info.value.magnitude == 1.5


class TestRuntimeErrors:
    """Test cases for convergence and consistency failures."""

    def test_not_converged_exit_code(self) -> None:
        exc = NoConvergenceError()
        assert exc.exit_code == 3
        assert not isinstance(exc, ValidationError)

    def test_optimizer_budget_is_reported_not_raised(self) -> None:
        """An exhausted optimizer budget is a report flag, not an exception."""
        assert not hasattr(exceptions, "OptimizerNotConvergedError")
        assert "OptimizerNotConvergedError" not in exceptions.__all__

    def test_internal_consistency(self) -> None:
        exc = InternalConsistencyError(magnitude=-0.01)
        assert exc.exit_code == 1
        assert exc.detail == "Measure value is negative beyond numerical noise"
        assert exc.magnitude == -0.01


class TestExceptionModuleExports:
    """Test cases for exception module exports."""

    def test_module_exports_all_exceptions(self) -> None:
        """Test that every exported name is an exception class of the hierarchy."""
        assert hasattr(exceptions, "__all__")
        assert "QuantumCorrelationError" in exceptions.__all__
        assert len(exceptions.__all__) == len(set(exceptions.__all__))

        for export_name in exceptions.__all__:
            export_class = getattr(exceptions, export_name)
            assert issubclass(export_class, QuantumCorrelationError)
