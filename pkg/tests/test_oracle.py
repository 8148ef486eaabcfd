"""Unit tests for the brute-force and closed-form references."""

import math

import numpy as np
import pytest

from qcorr.api.models import GridSpec
from qcorr.core import states
from qcorr.core.densop import BipartiteDims
from qcorr.core.entropy import EntropyUnit, von_neumann_entropy
from qcorr.core.oracle import (
    bell_mixture_closed_forms,
    binary_entropy,
    grid_discord_qubit,
    random_separable,
    random_state,
)
from qcorr.exceptions import BadRankError, OutOfRangeError, WrongDimensionError

COARSE = GridSpec(n_theta=19, n_phi=24)


def _partial_transpose_b(mat: np.ndarray) -> np.ndarray:
    return mat.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)


class TestClosedForms:
    """Test cases for the Bell-mixture closed forms."""

    @pytest.mark.parametrize("p, expected", [(0.5, 1.0), (0.0, 0.0), (1.0, 0.0), (0.75, 0.811278124459)])
    def test_binary_entropy(self, p, expected) -> None:
        assert binary_entropy(p) == pytest.approx(expected, abs=1e-12)

    def test_three_quarters(self) -> None:
        values = bell_mixture_closed_forms(0.75)
        assert values.deficit == pytest.approx(0.188721875541, abs=1e-9)
        assert values.discord == values.quantumness == values.ere == values.deficit
        assert values.mutual_info == pytest.approx(1.188721875541, abs=1e-9)

    @pytest.mark.parametrize("p", [0.1, 0.25, 0.4])
    def test_symmetric_in_p(self, p) -> None:
        left, right = bell_mixture_closed_forms(p), bell_mixture_closed_forms(1.0 - p)
        assert left.deficit == pytest.approx(right.deficit, abs=1e-15)
        assert left.mutual_info == pytest.approx(right.mutual_info, abs=1e-15)

    def test_nats(self) -> None:
        bits = bell_mixture_closed_forms(0.75)
        nats = bell_mixture_closed_forms(0.75, EntropyUnit.NATS)
        assert nats.deficit == pytest.approx(bits.deficit * math.log(2.0), abs=1e-15)

    def test_out_of_range(self) -> None:
        with pytest.raises(OutOfRangeError):
            bell_mixture_closed_forms(1.2)


class TestRandomStates:
    """Test cases for random_state and random_separable."""

    @pytest.mark.parametrize("rank", [1, 2, 3, 4])
    def test_rank_and_entropy(self, rank) -> None:
        rho = random_state(17, states.TWO_QUBITS, rank)
        assert np.linalg.matrix_rank(rho.mat, tol=1e-10) == rank
        assert np.trace(rho.mat).real == pytest.approx(1.0, abs=1e-14)
        assert von_neumann_entropy(rho, EntropyUnit.BITS).value <= math.log2(rank) + 1e-9

    def test_seeded(self) -> None:
        assert np.array_equal(random_state(3, states.TWO_QUBITS, 2).mat, random_state(3, states.TWO_QUBITS, 2).mat)
        assert not np.array_equal(random_state(3, states.TWO_QUBITS, 2).mat, random_state(4, states.TWO_QUBITS, 2).mat)

    @pytest.mark.parametrize("rank", [0, 5])
    def test_bad_rank(self, rank) -> None:
        with pytest.raises(BadRankError):
            random_state(1, states.TWO_QUBITS, rank)

    def test_bad_seed(self) -> None:
        with pytest.raises(OutOfRangeError):
            random_state(-1, states.TWO_QUBITS, 2)

    @pytest.mark.parametrize("seed", range(5))
    def test_random_separable_has_positive_partial_transpose(self, seed) -> None:
        rho = random_separable(seed, states.TWO_QUBITS, 4)
        assert np.min(np.linalg.eigvalsh(_partial_transpose_b(rho.mat))) >= -1e-12
        assert rho.dims == states.TWO_QUBITS

    def test_random_separable_bad_terms(self) -> None:
        with pytest.raises(BadRankError):
            random_separable(0, states.TWO_QUBITS, 0)


class TestGridDiscord:
    """Test cases for grid_discord_qubit."""

    def test_pure_bell(self, pure_bell_state) -> None:
        assert grid_discord_qubit(pure_bell_state, COARSE, EntropyUnit.BITS) == pytest.approx(1.0, abs=1e-9)

    def test_bell_mixture_hits_closed_form(self, bell_mixture_state) -> None:
        """theta = 0 is on every grid and is the optimal basis."""
        value = grid_discord_qubit(bell_mixture_state, COARSE, EntropyUnit.BITS)
        assert value == pytest.approx(bell_mixture_closed_forms(0.75).discord, abs=1e-9)

    def test_product_state(self, product_state) -> None:
        assert grid_discord_qubit(product_state, COARSE, EntropyUnit.BITS) == pytest.approx(0.0, abs=1e-9)

    def test_nonorthogonal_sep_is_positive(self) -> None:
        assert grid_discord_qubit(states.nonorthogonal_sep(0.5), COARSE, EntropyUnit.BITS) > 1e-3

    def test_refinement_is_monotone(self) -> None:
        rho = random_state(23, states.TWO_QUBITS, 2)
        values = [
            grid_discord_qubit(rho, GridSpec(n_theta=n_theta, n_phi=n_phi), EntropyUnit.BITS)
            for n_theta, n_phi in [(10, 12), (19, 24), (37, 48)]
        ]
        assert values[1] <= values[0] + 1e-12
        assert values[2] <= values[1] + 1e-12

    def test_qutrit_rejected(self) -> None:
        rho = random_state(1, BipartiteDims(3, 2), 2)
        with pytest.raises(WrongDimensionError):
            grid_discord_qubit(rho)
