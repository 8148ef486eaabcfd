"""Unit tests for density-operator construction, validation and algebra."""

import numpy as np
import pytest

from qcorr.core import states
from qcorr.core.densop import (
    PHASE_TOL,
    VALIDATION_TOL,
    BipartiteDims,
    DensityMatrix,
    Subsystem,
    hermitian_eig,
    maximally_mixed,
    partial_trace,
    pure_state,
    tensor_product,
    validate_density,
)
from qcorr.core.oracle import random_state
from qcorr.exceptions import (
    DimensionMismatchError,
    MissingDimsError,
    NotHermitianError,
    NotPositiveError,
    NotUnitTraceError,
    ValidationError,
)


def _random_hermitian(seed: int, dim: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return g + g.conj().T


class TestValidateDensity:
    """Test cases for validate_density."""

    def test_valid_matrix_is_kept_exactly(self, bell_mixture_state) -> None:
        """An exact density matrix passes through bit for bit."""
        rho = validate_density(bell_mixture_state.mat, BipartiteDims(2, 2))
        assert np.array_equal(rho.mat, bell_mixture_state.mat)
        assert rho.dims == BipartiteDims(2, 2)

    def test_result_is_read_only(self, bell_mixture_state) -> None:
        rho = validate_density(bell_mixture_state.mat)
        with pytest.raises(ValueError):
            rho.mat[0, 0] = 1.0

    def test_not_hermitian(self) -> None:
        mat = np.array([[0.5, 0.1], [0.3, 0.5]], dtype=complex)
        with pytest.raises(NotHermitianError) as exc_info:
            validate_density(mat)
        assert exc_info.value.magnitude == pytest.approx(0.2)
        assert exc_info.value.exit_code == 2

    def test_not_unit_trace(self) -> None:
        with pytest.raises(NotUnitTraceError) as exc_info:
            validate_density(np.eye(2))
        assert exc_info.value.magnitude == pytest.approx(1.0)

    def test_negative_eigenvalue(self) -> None:
        with pytest.raises(NotPositiveError) as exc_info:
            validate_density(np.diag([1.5, -0.5]))
        assert exc_info.value.magnitude == pytest.approx(0.5)

    def test_small_negative_eigenvalue_reads_as_zero(self) -> None:
        """Noise in [-VALIDATION_TOL, 0) stays in the matrix but not in the spectrum."""
        mat = np.diag([1.0 + 1e-11, -1e-11])
        rho = validate_density(mat)
        assert np.array_equal(rho.mat, mat)
        assert rho.eig.eigenvalues[-1] == 0.0
        assert np.all(rho.eig.eigenvalues >= 0.0)

    def test_negative_eigenvalue_at_tolerance_is_accepted(self) -> None:
        rho = validate_density(np.diag([1.0 + 0.9 * VALIDATION_TOL, -0.9 * VALIDATION_TOL]))
        assert rho.eig.eigenvalues[-1] == 0.0

    @pytest.mark.parametrize("seed", range(50))
    def test_validation_is_idempotent(self, seed) -> None:
        """Re-validating a validated state keeps every bit."""
        rho = random_state(seed, states.TWO_QUBITS, 1 + seed % 4)
        again = validate_density(rho.mat, rho.dims)
        assert np.array_equal(again.mat, rho.mat)

    def test_trace_within_tolerance_is_renormalized(self) -> None:
        rho = validate_density(np.diag([0.5 + 5e-11, 0.5]))
        assert np.trace(rho.mat).real == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("mat", [
        np.ones((2, 3)) / 2,
        np.ones(4) / 4,
        np.zeros((0, 0)),
    ])
    def test_not_square(self, mat) -> None:
        with pytest.raises(DimensionMismatchError):
            validate_density(mat)

    def test_dims_disagree_with_size(self) -> None:
        with pytest.raises(DimensionMismatchError):
            validate_density(np.eye(4) / 4, BipartiteDims(2, 3))

    def test_non_finite_entries(self) -> None:
        mat = np.eye(2) / 2
        mat[0, 1] = np.nan
        with pytest.raises(ValidationError):
            validate_density(mat)


class TestBipartiteDims:
    """Test cases for BipartiteDims."""

    def test_total(self) -> None:
        assert BipartiteDims(2, 3).total == 6

    @pytest.mark.parametrize("dim_a, dim_b", [(1, 2), (2, 1), (0, 0)])
    def test_rejects_trivial_subsystems(self, dim_a, dim_b) -> None:
        with pytest.raises(DimensionMismatchError):
            BipartiteDims(dim_a, dim_b)

    def test_require_dims(self) -> None:
        with pytest.raises(MissingDimsError):
            maximally_mixed(4).require_dims()


class TestHermitianEig:
    """Test cases for the Jacobi eigendecomposition."""

    def test_diagonal(self) -> None:
        result = hermitian_eig(np.diag([0.25, 0.75]))
        np.testing.assert_allclose(result.eigenvalues, [0.75, 0.25], atol=1e-15)

    def test_pauli_x(self) -> None:
        """X/2 + I/2 has eigenvalues 1, 0 with eigenvectors |+>, |->."""
        result = hermitian_eig(np.array([[0.5, 0.5], [0.5, 0.5]]))
        np.testing.assert_allclose(result.eigenvalues, [1.0, 0.0], atol=1e-14)
        plus = np.array([1.0, 1.0]) / np.sqrt(2.0)
        minus = np.array([1.0, -1.0]) / np.sqrt(2.0)
        np.testing.assert_allclose(result.eigenvectors[:, 0], plus, atol=1e-12)
        np.testing.assert_allclose(result.eigenvectors[:, 1], minus, atol=1e-12)

    def test_bell_mixture_spectrum(self, bell_mixture_state) -> None:
        result = hermitian_eig(bell_mixture_state.mat)
        np.testing.assert_allclose(result.eigenvalues, [0.75, 0.25, 0.0, 0.0], atol=1e-14)

    @pytest.mark.parametrize("seed, dim", [(0, 2), (1, 4), (2, 6), (3, 9)])
    def test_matches_lapack(self, seed, dim) -> None:
        h = _random_hermitian(seed, dim)
        result = hermitian_eig(h)
        np.testing.assert_allclose(result.eigenvalues, np.linalg.eigvalsh(h)[::-1], atol=1e-11)
        np.testing.assert_allclose(result.reconstruct(), h, atol=1e-11)
        gram = result.eigenvectors.conj().T @ result.eigenvectors
        np.testing.assert_allclose(gram, np.eye(dim), atol=1e-12)

    def test_matches_lapack_on_many_matrices(self) -> None:
        for seed in range(1000):
            dim = 2 + seed % 7
            h = _random_hermitian(10_000 + seed, dim)
            result = hermitian_eig(h)
            scale = max(1.0, float(np.max(np.abs(h))))
            np.testing.assert_allclose(result.eigenvalues, np.linalg.eigvalsh(h)[::-1], atol=1e-11 * scale)
            np.testing.assert_allclose(result.reconstruct(), h, atol=1e-11 * scale)
            gram = result.eigenvectors.conj().T @ result.eigenvectors
            np.testing.assert_allclose(gram, np.eye(dim), atol=1e-12)

    @pytest.mark.parametrize("seed", [4, 5, 6])
    def test_phase_convention(self, seed) -> None:
        """The first component above PHASE_TOL of each eigenvector is real and positive."""
        vectors = hermitian_eig(_random_hermitian(seed, 4)).eigenvectors
        for column in vectors.T:
            lead = column[np.flatnonzero(np.abs(column) > PHASE_TOL)[0]]
            assert lead.real > 0
            assert abs(lead.imag) < 1e-14

    def test_deterministic(self) -> None:
        h = _random_hermitian(7, 5)
        first, second = hermitian_eig(h), hermitian_eig(h)
        assert np.array_equal(first.eigenvalues, second.eigenvalues)
        assert np.array_equal(first.eigenvectors, second.eigenvectors)

    def test_degenerate_identity_keeps_standard_basis(self) -> None:
        result = hermitian_eig(np.eye(3) / 3)
        assert np.array_equal(result.eigenvectors, np.eye(3))
        assert result.sweeps == 0

    def test_rejects_non_hermitian(self) -> None:
        with pytest.raises(NotHermitianError):
            hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestTensorAndPartialTrace:
    """Test cases for Kronecker products and partial traces."""

    def test_maximally_mixed_product(self) -> None:
        rho = tensor_product(maximally_mixed(2), maximally_mixed(2))
        np.testing.assert_array_equal(rho.mat, np.eye(4) / 4)
        assert rho.dims == BipartiteDims(2, 2)

    def test_basis_product(self) -> None:
        rho = tensor_product(pure_state([1, 0]), pure_state([0, 1]))
        expected = np.zeros((4, 4))
        expected[1, 1] = 1.0
        np.testing.assert_array_equal(rho.mat, expected)

    def test_product_recovers_factors(self, product_state) -> None:
        rho_a = partial_trace(product_state, Subsystem.A)
        rho_b = partial_trace(product_state, Subsystem.B)
        np.testing.assert_allclose(np.kron(rho_a.mat, rho_b.mat), product_state.mat, atol=1e-15)
        assert np.trace(rho_a.mat).real == pytest.approx(1.0)

    @pytest.mark.parametrize("keep", ["A", "B"])
    def test_bell_marginals_are_maximally_mixed(self, pure_bell_state, bell_mixture_state, keep) -> None:
        np.testing.assert_allclose(partial_trace(pure_bell_state, keep).mat, np.eye(2) / 2, atol=1e-15)
        np.testing.assert_allclose(partial_trace(bell_mixture_state, keep).mat, np.eye(2) / 2, atol=1e-15)

    def test_unequal_dimensions(self) -> None:
        rho_a = maximally_mixed(2)
        rho_b = pure_state([1, 1j, 0])
        rho = tensor_product(rho_a, rho_b)
        assert rho.dims == BipartiteDims(2, 3)
        np.testing.assert_allclose(partial_trace(rho, Subsystem.B).mat, rho_b.mat, atol=1e-15)

    def test_missing_dims(self) -> None:
        with pytest.raises(MissingDimsError):
            partial_trace(maximally_mixed(4), Subsystem.A)

    def test_pure_state_normalizes(self) -> None:
        rho = pure_state([3.0, 4.0])
        assert np.trace(rho.mat).real == pytest.approx(1.0)

    def test_direct_construction_checks_dims(self) -> None:
        with pytest.raises(DimensionMismatchError):
            DensityMatrix(np.eye(4) / 4, BipartiteDims(3, 2))

    def test_partial_trace_of_family_state(self) -> None:
        rho = states.nonorthogonal_sep(0.5)
        np.testing.assert_allclose(
            partial_trace(rho, Subsystem.A).mat,
            np.array([[0.75, 0.25], [0.25, 0.25]]),
            atol=1e-15,
        )
