"""Brute-force and closed-form references for cross-checking the optimizers.

The grid oracle deliberately uses ``numpy.linalg.eigvalsh`` on the whole
grid at once rather than the Jacobi solver, so it shares no numerics with
the optimizer path beyond the density-matrix arithmetic.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.special

from qcorr.api.models import MAX_SEED, GridSpec
from qcorr.core.densop import BipartiteDims, DensityMatrix, validate_density
from qcorr.core.entropy import DEFAULT_UNIT, EntropyUnit, conditional_entropy_vn, shannon_entropy
from qcorr.core.optimize import SeparableAnsatz, ansatz_to_state, random_ansatz_params
from qcorr.exceptions import BadRankError, OutOfRangeError, WrongDimensionError


@dataclass(frozen=True)
class BellMixtureValues:
    """Closed-form measures of p|φ+><φ+| + (1-p)|φ-><φ-|."""
    deficit: float
    discord: float
    quantumness: float
    ere: float
    mutual_info: float


def _qubit_basis_vectors(grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    """Both basis vectors for every (theta, phi) grid point, flattened."""
    theta = np.linspace(0.0, math.pi, grid.n_theta)
    phi = np.arange(grid.n_phi) * (2.0 * math.pi / grid.n_phi)
    theta, phi = (axis.ravel() for axis in np.meshgrid(theta, phi, indexing="ij"))
    cos, sin, phase = np.cos(theta / 2.0), np.sin(theta / 2.0), np.exp(1j * phi)
    first = np.stack([cos + 0j, phase * sin], axis=1)
    second = np.stack([-phase.conj() * sin, cos + 0j], axis=1)
    return first, second


def _outcome_entropy_nats(tensor: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """p S(rho_B|outcome) for every grid vector, via Σ entr(λ) - entr(p)."""
    blocks = np.einsum("ga,abcd,gc->gbd", vectors.conj(), tensor, vectors)
    blocks = 0.5 * (blocks + np.conj(np.swapaxes(blocks, 1, 2)))
    spectra = np.clip(np.linalg.eigvalsh(blocks), 0.0, None)
    probabilities = spectra.sum(axis=1)
    return scipy.special.entr(spectra).sum(axis=1) - scipy.special.entr(probabilities)


def grid_discord_qubit(
    rho: DensityMatrix,
    grid: GridSpec = GridSpec(),
    unit: EntropyUnit | str = DEFAULT_UNIT
) -> float:
    """Discord minimized over a (theta, phi) grid of qubit bases on A.

    Raises:
        MissingDimsError: If rho has no bipartite dims
        WrongDimensionError: If subsystem A is not a qubit
    """
    unit = EntropyUnit(unit)
    dims = rho.require_dims()
    if dims.dim_a != 2:
        raise WrongDimensionError(detail=f"Grid oracle needs dim_a = 2, got {dims.dim_a}")
    tensor = rho.mat.reshape(dims.dim_a, dims.dim_b, dims.dim_a, dims.dim_b)
    first, second = _qubit_basis_vectors(grid)
    measured_nats = _outcome_entropy_nats(tensor, first) + _outcome_entropy_nats(tensor, second)
    measured = unit.from_nats(float(np.min(measured_nats)))
    return measured - conditional_entropy_vn(rho, unit).value


def binary_entropy(p: float) -> float:
    """H₂(p) in bits."""
    return shannon_entropy(np.array([p, 1.0 - p]), EntropyUnit.BITS)


def bell_mixture_closed_forms(p: float, unit: EntropyUnit | str = EntropyUnit.BITS) -> BellMixtureValues:
    """Deficit = discord = quantumness = ere = 1 - H₂(p); mutual_info = 2 - H₂(p) (bits).

    Raises:
        OutOfRangeError: If p is outside [0, 1]
    """
    if not 0.0 <= p <= 1.0:
        raise OutOfRangeError(detail=f"p must lie in [0, 1], got {p}", magnitude=float(p))
    scale = 1.0 if EntropyUnit(unit) is EntropyUnit.BITS else math.log(2.0)
    quantum = (1.0 - binary_entropy(p)) * scale
    return BellMixtureValues(
        deficit=quantum,
        discord=quantum,
        quantumness=quantum,
        ere=quantum,
        mutual_info=(2.0 - binary_entropy(p)) * scale,
    )


def _check_seed(seed: int) -> None:
    if not 0 <= seed < MAX_SEED:
        raise OutOfRangeError(detail=f"Seed must be an unsigned 64-bit integer, got {seed}")


def random_state(seed: int, dims: BipartiteDims, rank: int) -> DensityMatrix:
    """G G† / Tr(G G†) for a seeded complex Gaussian G of width ``rank``.

    Raises:
        BadRankError: If rank is outside [1, dim_a * dim_b]
    """
    _check_seed(seed)
    if not 1 <= rank <= dims.total:
        raise BadRankError(detail=f"Rank must lie in [1, {dims.total}], got {rank}")
    rng = np.random.default_rng(seed)
    gaussian = rng.standard_normal((dims.total, rank)) + 1j * rng.standard_normal((dims.total, rank))
    gram = gaussian @ gaussian.conj().T
    gram = 0.5 * (gram + gram.conj().T)
    return validate_density(gram / np.trace(gram).real, dims)


def random_separable(seed: int, dims: BipartiteDims, k: int) -> DensityMatrix:
    """State of a seeded random k-term separable ansatz.

    Raises:
        BadRankError: If k < 1
    """
    _check_seed(seed)
    if k < 1:
        raise BadRankError(detail=f"Term count must be at least 1, got {k}")
    rng = np.random.default_rng(seed)
    ansatz = SeparableAnsatz.from_params(random_ansatz_params(rng, dims, k), dims, k)
    return validate_density(ansatz_to_state(ansatz).mat, dims)
