"""Rank-one measurements on subsystem A and their effect on a bipartite state.

Both scheme types reduce to a stack of vectors ``k_i`` on A. Outcome ``i``
applies the operator ``V_i = ||k_i|| |k_i^><k_i^|`` (so ``V_i†V_i = k_i k_i†``),
which for a projective scheme is the projector itself.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
import scipy.linalg

from qcorr.api.models import OptimizerConfig
from qcorr.core.densop import (
    BipartiteDims,
    ComplexMatrix,
    DensityMatrix,
    Subsystem,
    hermitian_eig,
    partial_trace,
)
from qcorr.core.entropy import DEFAULT_UNIT, EntropyUnit, EntropyValue, shannon_entropy
from qcorr.core.optimize import multi_restart
from qcorr.exceptions import BadParamLengthError, DimensionMismatchError, RankDeficientError

logger = logging.getLogger(__name__)

COMPLETENESS_TOL = 1e-9
ZERO_PROBABILITY = 1e-12
RANK_TOL = 1e-8
DEGENERACY_TOL = 1e-8
# Frobenius distance under which two conditional B states count as one outcome
MERGE_TOL = 1e-6
# Fixed seed and budget of the basis search inside degenerate marginal eigenspaces
DECOHERING_SEARCH = OptimizerConfig(seed=0, restarts=8, max_iters=2000, xtol=1e-10, ftol=1e-15, workers=1)
# Improvement in H(P), in nats, needed to leave the solver's eigenvectors
DECOHERING_GAIN = 1e-12


def _check_completeness(vectors: ComplexMatrix, dim: int) -> None:
    total = np.einsum("ia,ib->ab", vectors, vectors.conj())
    defect = float(np.max(np.abs(total - np.eye(dim))))
    if defect > COMPLETENESS_TOL:
        raise DimensionMismatchError(
            detail=f"Measurement elements do not sum to identity (defect {defect:.3e})",
            magnitude=defect,
        )


@dataclass(frozen=True)
class ProjectiveMeasurement:
    """Complete set of orthogonal rank-1 projectors |u_k><u_k| on A.

    ``basis`` holds the vectors u_k as columns of a unitary matrix.
    """
    basis: ComplexMatrix

    def __post_init__(self) -> None:
        basis = np.array(self.basis, dtype=np.complex128)
        if basis.ndim != 2 or basis.shape[0] != basis.shape[1]:
            raise DimensionMismatchError(detail=f"Basis must be square, got shape {basis.shape}")
        gram = basis.conj().T @ basis
        defect = float(np.max(np.abs(gram - np.eye(basis.shape[0]))))
        if defect > COMPLETENESS_TOL:
            raise DimensionMismatchError(
                detail=f"Basis is not orthonormal (defect {defect:.3e})", magnitude=defect
            )
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def kraus_vectors(self) -> ComplexMatrix:
        return self.basis.T

    @property
    def projectors(self) -> list[ComplexMatrix]:
        return [np.outer(vec, vec.conj()) for vec in self.kraus_vectors]


@dataclass(frozen=True)
class RankOnePOVM:
    """Rank-1 POVM with elements E_i = k_i k_i†; rows of ``kraus_vectors`` are k_i."""
    kraus_vectors: ComplexMatrix

    def __post_init__(self) -> None:
        vectors = np.array(self.kraus_vectors, dtype=np.complex128)
        if vectors.ndim != 2 or vectors.shape[0] < vectors.shape[1]:
            raise DimensionMismatchError(
                detail=f"A POVM on dimension d needs at least d elements, got shape {vectors.shape}"
            )
        _check_completeness(vectors, vectors.shape[1])
        vectors.setflags(write=False)
        object.__setattr__(self, "kraus_vectors", vectors)

    @property
    def dim(self) -> int:
        return self.kraus_vectors.shape[1]

    @property
    def elements(self) -> list[ComplexMatrix]:
        return [np.outer(vec, vec.conj()) for vec in self.kraus_vectors]


MeasurementScheme = Union[ProjectiveMeasurement, RankOnePOVM]


@dataclass(frozen=True)
class MeasurementOutcome:
    """One outcome of a measurement on A: probability and conditional AB state."""
    probability: float
    conditional_state: DensityMatrix
    conditional_b: ComplexMatrix
    degenerate: bool = False


def projective_param_count(dim_a: int) -> int:
    return dim_a * dim_a - dim_a


def _givens(dim: int, i: int, j: int, theta: float, phi: float) -> ComplexMatrix:
    rotation = np.eye(dim, dtype=np.complex128)
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    rotation[i, i] = c
    rotation[j, j] = c
    rotation[j, i] = np.exp(1j * phi) * s
    rotation[i, j] = -np.exp(-1j * phi) * s
    return rotation


def unitary_from_params(dim_a: int, params: np.ndarray) -> ComplexMatrix:
    """Product of Givens rotations over index pairs (i < j) in lexicographic order.

    Each pair consumes (theta, phi). For a qubit the first column is
    cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.
    """
    values = np.asarray(params, dtype=np.float64).ravel()
    if values.size != projective_param_count(dim_a):
        raise BadParamLengthError(
            detail=f"Expected {projective_param_count(dim_a)} parameters for dim {dim_a}, got {values.size}"
        )
    unitary = np.eye(dim_a, dtype=np.complex128)
    pairs = itertools.combinations(range(dim_a), 2)
    for index, (i, j) in enumerate(pairs):
        unitary = unitary @ _givens(dim_a, i, j, values[2 * index], values[2 * index + 1])
    return unitary


def projectors_from_params(dim_a: int, params: np.ndarray) -> ProjectiveMeasurement:
    """Orthonormal basis on A from dim_a² - dim_a real angles; zeros give the computational basis.

    Raises:
        BadParamLengthError: If params has the wrong length
    """
    return ProjectiveMeasurement(basis=unitary_from_params(dim_a, params))


def povm_from_params(dim_a: int, m: int, raw: np.ndarray) -> RankOnePOVM:
    """Retract an m x dim_a complex matrix onto a rank-1 POVM via K (K†K)^(-1/2).

    Row i of the retracted matrix, conjugated, is the POVM vector k_i.

    Raises:
        BadParamLengthError: If raw is not m x dim_a or m < dim_a
        RankDeficientError: If the smallest singular value of raw is at most RANK_TOL
    """
    seed = np.asarray(raw, dtype=np.complex128)
    if seed.shape != (m, dim_a) or m < dim_a:
        raise BadParamLengthError(
            detail=f"Expected a {m}x{dim_a} seed matrix with m >= {dim_a}, got shape {seed.shape}"
        )
    smallest = float(scipy.linalg.svdvals(seed)[-1])
    if smallest <= RANK_TOL:
        raise RankDeficientError(
            detail=f"Seed matrix smallest singular value {smallest:.3e}", magnitude=smallest
        )
    gram = seed.conj().T @ seed
    inverse_root = scipy.linalg.inv(scipy.linalg.sqrtm(gram))
    retracted = seed @ inverse_root
    return RankOnePOVM(kraus_vectors=retracted.conj())


def povm_from_real_params(dim_a: int, m: int, params: np.ndarray) -> RankOnePOVM:
    """Same as :func:`povm_from_params`, reading real then imaginary parts from a flat vector."""
    values = np.asarray(params, dtype=np.float64).ravel()
    size = m * dim_a
    if values.size != 2 * size:
        raise BadParamLengthError(detail=f"Expected {2 * size} parameters, got {values.size}")
    raw = (values[:size] + 1j * values[size:]).reshape(m, dim_a)
    return povm_from_params(dim_a, m, raw)


def _scheme_dims(rho: DensityMatrix, scheme: MeasurementScheme) -> BipartiteDims:
    dims = rho.require_dims()
    if scheme.dim != dims.dim_a:
        raise DimensionMismatchError(
            detail=f"Measurement acts on dimension {scheme.dim}, subsystem A has {dims.dim_a}"
        )
    return dims


def conditional_blocks(rho: DensityMatrix, scheme: MeasurementScheme) -> tuple[np.ndarray, np.ndarray]:
    """Unnormalized B blocks <k_i|rho|k_i>_A and their traces q_i."""
    dims = _scheme_dims(rho, scheme)
    tensor = rho.mat.reshape(dims.dim_a, dims.dim_b, dims.dim_a, dims.dim_b)
    vectors = scheme.kraus_vectors
    blocks = np.einsum("ka,abcd,kc->kbd", vectors.conj(), tensor, vectors)
    probabilities = np.real(np.einsum("kbb->k", blocks))
    return probabilities, blocks


def measure_subsystem_a(
    rho: DensityMatrix,
    scheme: MeasurementScheme
) -> tuple[list[MeasurementOutcome], DensityMatrix]:
    """Outcomes of a measurement on A and the unconditioned post-measurement state.

    Outcomes with probability below ZERO_PROBABILITY are reported with
    probability 0 and an identity-normalized placeholder flagged degenerate.

    Raises:
        MissingDimsError: If rho has no bipartite dims
        DimensionMismatchError: If the scheme does not act on subsystem A
    """
    dims = _scheme_dims(rho, scheme)
    probabilities, blocks = conditional_blocks(rho, scheme)
    outcomes: list[MeasurementOutcome] = []
    post = np.zeros((dims.total, dims.total), dtype=np.complex128)

    for vector, probability, block in zip(scheme.kraus_vectors, probabilities, blocks):
        norm = np.linalg.norm(vector)
        # Zero POVM vectors never fire; any unit direction serves as placeholder
        unit_vector = vector / norm if norm > 0.0 else np.eye(dims.dim_a, dtype=np.complex128)[0]
        projector = np.outer(unit_vector, unit_vector.conj())
        post += np.kron(projector, block)
        if probability < ZERO_PROBABILITY:
            placeholder = np.eye(dims.dim_b, dtype=np.complex128) / dims.dim_b
            outcomes.append(MeasurementOutcome(
                probability=0.0,
                conditional_state=DensityMatrix(np.kron(projector, placeholder), dims),
                conditional_b=placeholder,
                degenerate=True,
            ))
            continue
        conditional_b = block / probability
        outcomes.append(MeasurementOutcome(
            probability=float(probability),
            conditional_state=DensityMatrix(np.kron(projector, conditional_b), dims),
            conditional_b=conditional_b,
        ))

    return outcomes, DensityMatrix(post, dims)


def weighted_conditional_entropy(
    rho: DensityMatrix,
    scheme: MeasurementScheme,
    unit: EntropyUnit | str = DEFAULT_UNIT
) -> float:
    """Σ_i q_i S(rho_B^i) over outcomes with nonzero probability."""
    unit = EntropyUnit(unit)
    probabilities, blocks = conditional_blocks(rho, scheme)
    total = 0.0
    for probability, block in zip(probabilities, blocks):
        if probability < ZERO_PROBABILITY:
            continue
        spectrum = hermitian_eig(block / probability).eigenvalues
        total += probability * shannon_entropy(spectrum, unit)
    return total


def conditional_entropy_measured(
    rho: DensityMatrix,
    scheme: MeasurementScheme,
    unit: EntropyUnit | str = DEFAULT_UNIT
) -> EntropyValue:
    """S(B|A_Π) = Σ_α p_α S(rho_AB^(α)).

    Each conditional AB state is |u_α><u_α| ⊗ rho_B^(α), so its entropy is
    that of the B block.
    """
    unit = EntropyUnit(unit)
    return EntropyValue(weighted_conditional_entropy(rho, scheme, unit), unit)


def post_measurement_marginal_a(rho: DensityMatrix, scheme: MeasurementScheme) -> DensityMatrix:
    """rho'_A after the measurement, i.e. Σ_i q_i |k_i^><k_i^|."""
    _, post_state = measure_subsystem_a(rho, scheme)
    return partial_trace(post_state, Subsystem.A)


def _marginal_spectrum(rho: DensityMatrix, keep: Subsystem) -> tuple[ComplexMatrix, np.ndarray]:
    decomposition = hermitian_eig(partial_trace(rho, keep).mat)
    return decomposition.eigenvectors, decomposition.eigenvalues


def marginal_eigenbasis(rho: DensityMatrix, keep: Subsystem) -> tuple[ComplexMatrix, bool]:
    """Eigenvector columns of a marginal and whether its spectrum has a tie."""
    vectors, values = _marginal_spectrum(rho, keep)
    gaps = np.abs(np.diff(values))
    return vectors, bool(np.any(gaps < DEGENERACY_TOL))


def marginal_degeneracy(rho: DensityMatrix) -> bool:
    """True when either marginal has a degenerate spectrum."""
    _, degenerate_a = marginal_eigenbasis(rho, Subsystem.A)
    _, degenerate_b = marginal_eigenbasis(rho, Subsystem.B)
    return degenerate_a or degenerate_b


def _degenerate_groups(eigenvalues: np.ndarray) -> list[np.ndarray]:
    """Index runs of a descending spectrum whose neighbours lie within DEGENERACY_TOL."""
    groups: list[list[int]] = [[0]]
    for index in range(1, eigenvalues.size):
        if eigenvalues[index - 1] - eigenvalues[index] < DEGENERACY_TOL:
            groups[-1].append(index)
        else:
            groups.append([index])
    return [np.array(group) for group in groups if len(group) > 1]


def _rotate_within(basis: ComplexMatrix, groups: list[np.ndarray], params: np.ndarray) -> ComplexMatrix:
    rotated = basis.copy()
    offset = 0
    for group in groups:
        count = projective_param_count(group.size)
        rotated[:, group] = basis[:, group] @ unitary_from_params(group.size, params[offset:offset + count])
        offset += count
    return rotated


def _product_diagonal(rho: DensityMatrix, basis_a: ComplexMatrix, basis_b: ComplexMatrix) -> np.ndarray:
    product_basis = np.kron(basis_a, basis_b)
    return np.real(np.sum(product_basis.conj() * (rho.mat @ product_basis), axis=0))


def decohering_bases(rho: DensityMatrix) -> tuple[ComplexMatrix, ComplexMatrix, bool]:
    """Marginal eigenbases of A and B for decohering rho, and the degeneracy flag.

    Inside a degenerate eigenspace of either marginal the basis is not fixed
    by the spectrum. There it is rotated to minimize S(rho || rho_dec), which
    for a dephasing equals H(P) - S(rho) with P the diagonal of rho in the
    product basis, so the result does not depend on local unitaries. The
    search is seeded with DECOHERING_SEARCH and starts from the solver's
    eigenvectors at restart 0, which are kept unless the search beats them by
    DECOHERING_GAIN.
    """
    vectors_a, values_a = _marginal_spectrum(rho, Subsystem.A)
    vectors_b, values_b = _marginal_spectrum(rho, Subsystem.B)
    groups_a, groups_b = _degenerate_groups(values_a), _degenerate_groups(values_b)
    if not groups_a and not groups_b:
        return vectors_a, vectors_b, False

    split = sum(projective_param_count(group.size) for group in groups_a)
    count = split + sum(projective_param_count(group.size) for group in groups_b)

    def rotated(params: np.ndarray) -> tuple[ComplexMatrix, ComplexMatrix]:
        return (
            _rotate_within(vectors_a, groups_a, params[:split]),
            _rotate_within(vectors_b, groups_b, params[split:]),
        )

    def objective(params: np.ndarray) -> float:
        return shannon_entropy(_product_diagonal(rho, *rotated(params)), EntropyUnit.NATS)

    def sample(rng: np.random.Generator, index: int) -> np.ndarray:
        if index == 0:
            return np.zeros(count)
        return rng.uniform(0.0, 2.0 * math.pi, count)

    result = multi_restart(objective, sample, DECOHERING_SEARCH)
    if result.best_value > objective(np.zeros(count)) - DECOHERING_GAIN:
        return vectors_a, vectors_b, True
    logger.debug(
        "Rotated degenerate marginal eigenspaces: H(P) = %.12g nats (restart %d)",
        result.best_value, result.restart_index,
    )
    basis_a, basis_b = rotated(result.best_params)
    return basis_a, basis_b, True


def decohere_in_bases(rho: DensityMatrix, basis_a: ComplexMatrix, basis_b: ComplexMatrix) -> DensityMatrix:
    """Σ_{a,b} P(a,b) |a><a| ⊗ |b><b| with P the diagonal of rho in basis_a ⊗ basis_b.

    Entries of P below ZERO_PROBABILITY are dropped before renormalizing.
    """
    dims = rho.require_dims()
    product_basis = np.kron(basis_a, basis_b)
    diagonal = _product_diagonal(rho, basis_a, basis_b)
    diagonal = np.where(diagonal < ZERO_PROBABILITY, 0.0, diagonal)
    diagonal = diagonal / diagonal.sum()
    return DensityMatrix((product_basis * diagonal) @ product_basis.conj().T, dims)


def decohered_state(rho: DensityMatrix) -> DensityMatrix:
    """rho decohered in the marginal eigenbases chosen by :func:`decohering_bases`."""
    basis_a, basis_b, _ = decohering_bases(rho)
    return decohere_in_bases(rho, basis_a, basis_b)


def coarse_grained_probabilities(
    rho: DensityMatrix,
    scheme: MeasurementScheme,
    tol: float = MERGE_TOL
) -> np.ndarray:
    """Outcome distribution with outcomes that leave B in the same state merged.

    Two outcomes merge when their normalized conditional B states lie within
    ``tol`` in Frobenius norm. Merging leaves Σ_i q_i S(rho_B^i) unchanged.
    Outcomes with probability below ZERO_PROBABILITY are dropped.
    """
    probabilities, blocks = conditional_blocks(rho, scheme)
    merged: list[float] = []
    representatives: list[ComplexMatrix] = []
    for probability, block in zip(probabilities, blocks):
        if probability < ZERO_PROBABILITY:
            continue
        state = block / probability
        for index, representative in enumerate(representatives):
            if np.linalg.norm(state - representative) <= tol:
                merged[index] += float(probability)
                break
        else:
            representatives.append(state)
            merged.append(float(probability))
    return np.array(merged)
