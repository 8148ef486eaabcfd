"""Quantum-correlation measures of a bipartite state, measured on subsystem A.

Every measure returns a MeasureReport carrying its value, the witness that
achieves it (a measurement or a separable ansatz) and optimizer diagnostics.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Optional, Union

import numpy as np

from qcorr.api.models import OptimizerConfig
from qcorr.core.densop import BipartiteDims, DensityMatrix, Subsystem, hermitian_eig, partial_trace
from qcorr.core.entropy import (
    EntropyUnit,
    conditional_entropy_vn,
    mutual_information,
    relative_entropy,
    shannon_entropy,
    von_neumann_entropy,
)
from qcorr.core.measurement import (
    ProjectiveMeasurement,
    RankOnePOVM,
    coarse_grained_probabilities,
    conditional_blocks,
    conditional_entropy_measured,
    decohere_in_bases,
    decohering_bases,
    measure_subsystem_a,
    povm_from_real_params,
    projective_param_count,
    projectors_from_params,
    weighted_conditional_entropy,
)
from qcorr.core.optimize import (
    OptResult,
    SeparableAnsatz,
    ansatz_to_state,
    marginal_residual,
    multi_restart,
    penalized_q_objective,
    penalty_continuation,
    random_ansatz_params,
)
from qcorr.exceptions import InternalConsistencyError, OutOfRangeError, RankDeficientError

logger = logging.getLogger(__name__)

NEGATIVE_NOISE = 1e-9
# Raw weight given to unused ansatz terms in a structured start
DORMANT_WEIGHT = math.log(1e-12)

Certificate = Union[ProjectiveMeasurement, RankOnePOVM, SeparableAnsatz, None]


@dataclass(frozen=True)
class MeasureReport:
    """Value of one measure with its certificate and diagnostics."""
    measure_name: str
    value: float
    certificate: Certificate = None
    constraint_residual: Optional[float] = None
    diagnostics: Optional[OptResult] = None
    degeneracy_flag: bool = False
    unit: EntropyUnit = EntropyUnit.BITS
    extras: dict[str, Any] = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return self.diagnostics is None or self.diagnostics.converged


def _clamp(name: str, value: float) -> float:
    """Zero out values within NEGATIVE_NOISE below zero; larger negatives are bugs."""
    if value < -NEGATIVE_NOISE:
        raise InternalConsistencyError(
            detail=f"{name} evaluated to {value:.3e}", magnitude=-value
        )
    return max(value, 0.0)


def _angle_sampler(dim_a: int):
    count = projective_param_count(dim_a)

    def sample(rng: np.random.Generator, index: int) -> np.ndarray:
        if index == 0:
            return np.zeros(count)
        angles = np.empty(count)
        angles[0::2] = rng.uniform(0.0, math.pi, count // 2)
        angles[1::2] = rng.uniform(0.0, 2.0 * math.pi, count // 2)
        return angles

    return sample


def _projective_search(rho: DensityMatrix, objective, config: OptimizerConfig) -> tuple[OptResult, ProjectiveMeasurement]:
    dim_a = rho.require_dims().dim_a
    result = multi_restart(objective, _angle_sampler(dim_a), config)
    return result, projectors_from_params(dim_a, result.best_params)


def quantum_discord(
    rho: DensityMatrix,
    config: OptimizerConfig,
    unit: EntropyUnit | str = EntropyUnit.BITS
) -> MeasureReport:
    """Discord: min over rank-1 projective measurements Π on A of S(B|A_Π) - S(B|A).

    Raises:
        MissingDimsError: If rho has no bipartite dims
    """
    unit = EntropyUnit(unit)
    dim_a = rho.require_dims().dim_a

    def objective(params: np.ndarray) -> float:
        return conditional_entropy_measured(rho, projectors_from_params(dim_a, params), unit).value

    result, basis = _projective_search(rho, objective, config)
    value = _clamp("discord", result.best_value - conditional_entropy_vn(rho, unit).value)
    logger.info("discord = %.12g %s (restart %d)", value, unit.value, result.restart_index)
    return MeasureReport("discord", value, basis, diagnostics=result, unit=unit)


def quantum_deficit(rho: DensityMatrix, unit: EntropyUnit | str = EntropyUnit.BITS) -> MeasureReport:
    """Deficit: S(rho || rho_dec) with rho_dec the state decohered in the marginal eigenbases.

    Degenerate marginal eigenspaces are resolved by :func:`decohering_bases`
    and flagged on the report.

    Raises:
        MissingDimsError: If rho has no bipartite dims
    """
    unit = EntropyUnit(unit)
    basis_a, basis_b, degenerate = decohering_bases(rho)
    value = _clamp("deficit", relative_entropy(rho, decohere_in_bases(rho, basis_a, basis_b), unit).value)
    return MeasureReport(
        "deficit", value, ProjectiveMeasurement(basis_a),
        degeneracy_flag=degenerate, unit=unit,
    )


def classical_correlation_hv(
    rho: DensityMatrix,
    m_outcomes: Optional[int],
    config: OptimizerConfig,
    unit: EntropyUnit | str = EntropyUnit.BITS
) -> MeasureReport:
    """HV classical correlation: max over rank-1 POVMs on A of S(rho_B) - Σ_i q_i S(rho_B^i).

    When several restarts reach the optimum within config.ftol, the certificate
    is the one whose coarse-grained outcome distribution has the lowest
    entropy. ``extras["outcome_probabilities"]`` holds that distribution.

    Raises:
        MissingDimsError: If rho has no bipartite dims
        OutOfRangeError: If m_outcomes < dim_a
    """
    unit = EntropyUnit(unit)
    dims = rho.require_dims()
    m = m_outcomes or config.outcomes_for(dims)
    if m < dims.dim_a:
        raise OutOfRangeError(detail=f"m_outcomes must be at least {dims.dim_a}, got {m}")
    entropy_b = von_neumann_entropy(partial_trace(rho, Subsystem.B), unit).value

    def objective(params: np.ndarray) -> float:
        try:
            povm = povm_from_real_params(dims.dim_a, m, params)
        except RankDeficientError:
            return math.inf
        return weighted_conditional_entropy(rho, povm, unit) - entropy_b

    def sample(rng: np.random.Generator, index: int) -> np.ndarray:
        if index == 0:
            seed = np.zeros((m, dims.dim_a))
            seed[:dims.dim_a] = np.eye(dims.dim_a)
            return np.concatenate([seed.ravel(), np.zeros(m * dims.dim_a)])
        return rng.standard_normal(2 * m * dims.dim_a)

    result = multi_restart(objective, sample, config)
    index, povm, probabilities = _least_informative_optimum(rho, dims.dim_a, m, result, config.ftol)
    value = _clamp("cc_hv", -result.restart_values[index])
    logger.info("cc_hv = %.12g %s with %d outcomes (restart %d)", value, unit.value, m, index)
    return MeasureReport(
        "cc_hv", value, povm, diagnostics=result, unit=unit,
        extras={"outcome_probabilities": probabilities, "restart_index": index},
    )


def _least_informative_optimum(
    rho: DensityMatrix,
    dim_a: int,
    m: int,
    result: OptResult,
    ftol: float
) -> tuple[int, RankOnePOVM, np.ndarray]:
    """Among restarts within ftol of the best, the POVM with the lowest outcome entropy.

    Outcome distributions are coarse-grained first, so outcomes that leave B
    in the same state count once. Ties go to the lowest restart index.
    """
    chosen: Optional[tuple[float, int, RankOnePOVM, np.ndarray]] = None
    for index, (value, params) in enumerate(zip(result.restart_values, result.restart_params)):
        if not value <= result.best_value + ftol:
            continue
        povm = povm_from_real_params(dim_a, m, params)
        probabilities = coarse_grained_probabilities(rho, povm)
        entropy = shannon_entropy(probabilities)
        if chosen is None or entropy < chosen[0]:
            chosen = (entropy, index, povm, probabilities)
    _, index, povm, probabilities = chosen
    return index, povm, probabilities


def eigenbasis_start(rho: DensityMatrix, terms: int) -> np.ndarray:
    """Ansatz parameters for the state left by measuring A in its eigenbasis.

    The eigenbasis is the one :func:`decohering_bases` picks, so degenerate
    marginals get a basis that follows local unitaries. That state is
    separable and has the same B marginal as rho. When it needs more than
    ``terms`` product terms, only the heaviest are kept.
    """
    dims = rho.require_dims()
    basis_a, _, _ = decohering_bases(rho)
    _, blocks = conditional_blocks(rho, ProjectiveMeasurement(basis_a))
    candidates = []
    for a_index, block in enumerate(blocks):
        spectrum = hermitian_eig(block)
        for weight, b_vector in zip(spectrum.eigenvalues, spectrum.eigenvectors.T):
            candidates.append((max(float(weight), 0.0), basis_a[:, a_index], b_vector))
    candidates.sort(key=lambda item: -item[0])
    candidates = candidates[:terms]

    weights_raw = np.full(terms, DORMANT_WEIGHT)
    a_vectors = np.zeros((terms, dims.dim_a), dtype=np.complex128)
    b_vectors = np.zeros((terms, dims.dim_b), dtype=np.complex128)
    a_vectors[:, 0] = 1.0
    b_vectors[:, 0] = 1.0
    for index, (weight, a_vector, b_vector) in enumerate(candidates):
        weights_raw[index] = math.log(max(weight, 1e-12))
        a_vectors[index] = a_vector
        b_vectors[index] = b_vector
    return SeparableAnsatz(weights_raw, a_vectors, b_vectors).to_params()


def _separable_sampler(rho: DensityMatrix, dims: BipartiteDims, terms: int):
    def sample(rng: np.random.Generator, index: int) -> np.ndarray:
        if index == 0:
            return eigenbasis_start(rho, terms)
        return random_ansatz_params(rng, dims, terms)

    return sample


def quantumness(
    rho: DensityMatrix,
    config: OptimizerConfig,
    unit: EntropyUnit | str = EntropyUnit.BITS
) -> MeasureReport:
    """Quantumness: min S(rho || sigma) over separable sigma sharing rho's B marginal.

    The marginal constraint is enforced by a quadratic penalty raised along
    config.penalty_schedule. The reported value is the exact relative
    entropy at the certificate, without the penalty term.

    Raises:
        MissingDimsError: If rho has no bipartite dims
    """
    unit = EntropyUnit(unit)
    dims = rho.require_dims()
    terms = config.terms_for(dims)
    target_b = partial_trace(rho, Subsystem.B)

    final_objective = penalized_q_objective(rho, target_b, config.penalty_schedule[-1], terms, unit)
    result = multi_restart(
        final_objective,
        _separable_sampler(rho, dims, terms),
        config,
        local_search=penalty_continuation(rho, target_b, terms, unit),
    )
    ansatz = SeparableAnsatz.from_params(result.best_params, dims, terms)
    exact = relative_entropy(rho, ansatz_to_state(ansatz), unit).value
    value = _clamp("quantumness", exact)
    residual = marginal_residual(ansatz, target_b)
    logger.info("quantumness = %.12g %s (residual %.3e)", value, unit.value, residual)
    return MeasureReport(
        "quantumness", value, ansatz,
        constraint_residual=residual, diagnostics=result, unit=unit,
        extras={"penalized_value": result.best_value},
    )


def relative_entropy_of_entanglement(
    rho: DensityMatrix,
    config: OptimizerConfig,
    unit: EntropyUnit | str = EntropyUnit.BITS
) -> MeasureReport:
    """Relative entropy of entanglement: min S(rho || sigma) over all separable sigma (no marginal constraint).

    Raises:
        MissingDimsError: If rho has no bipartite dims
    """
    unit = EntropyUnit(unit)
    dims = rho.require_dims()
    terms = config.terms_for(dims)
    target_b = partial_trace(rho, Subsystem.B)
    objective = penalized_q_objective(rho, target_b, 0.0, terms, unit)
    result = multi_restart(objective, _separable_sampler(rho, dims, terms), config)
    ansatz = SeparableAnsatz.from_params(result.best_params, dims, terms)
    value = _clamp("ere", relative_entropy(rho, ansatz_to_state(ansatz), unit).value)
    logger.info("ere = %.12g %s", value, unit.value)
    return MeasureReport("ere", value, ansatz, diagnostics=result, unit=unit)


def generalized_classical_correlation(
    rho: DensityMatrix,
    config: OptimizerConfig,
    unit: EntropyUnit | str = EntropyUnit.BITS,
    quantumness_report: Optional[MeasureReport] = None
) -> MeasureReport:
    """S(A:B) minus the quantumness; reuses ``quantumness_report`` when given.

    Raises:
        MissingDimsError: If rho has no bipartite dims
    """
    unit = EntropyUnit(unit)
    q_report = quantumness_report or quantumness(rho, config, unit)
    value = _clamp("cc_generalized", mutual_information(rho, unit).value - q_report.value)
    return MeasureReport(
        "cc_generalized", value, q_report.certificate,
        constraint_residual=q_report.constraint_residual,
        diagnostics=q_report.diagnostics, unit=unit,
    )


def additivity_gap(
    rho: DensityMatrix,
    m_outcomes: Optional[int],
    config: OptimizerConfig,
    unit: EntropyUnit | str = EntropyUnit.BITS,
    cc_report: Optional[MeasureReport] = None,
    ere_report: Optional[MeasureReport] = None
) -> float:
    """S(A:B) - cc_hv - ere + H(q), with q the coarse-grained outcome distribution of the optimal HV POVM.

    Nonnegative up to optimizer tolerance. Reuses the given reports when present.
    """
    unit = EntropyUnit(unit)
    cc_report = cc_report or classical_correlation_hv(rho, m_outcomes, config, unit)
    ere_report = ere_report or relative_entropy_of_entanglement(rho, config, unit)
    outcome_entropy = shannon_entropy(cc_report.extras["outcome_probabilities"], unit)
    return (
        mutual_information(rho, unit).value
        - cc_report.value
        - ere_report.value
        + outcome_entropy
    )


def projective_quantumness(
    rho: DensityMatrix,
    config: OptimizerConfig,
    unit: EntropyUnit | str = EntropyUnit.BITS
) -> MeasureReport:
    """min_Π S(rho || rho'_Π) = min_Π S(rho'_Π) - S(rho) over projective measurements on A.

    Upper bound on the quantumness reached without extending the system; equals the
    deficit when the eigenprojectors of rho_A are optimal.
    """
    unit = EntropyUnit(unit)
    dim_a = rho.require_dims().dim_a
    entropy_rho = von_neumann_entropy(rho, unit).value

    def objective(params: np.ndarray) -> float:
        _, post_state = measure_subsystem_a(rho, projectors_from_params(dim_a, params))
        return von_neumann_entropy(post_state, unit).value - entropy_rho

    result, basis = _projective_search(rho, objective, config)
    value = _clamp("q_projective", result.best_value)
    return MeasureReport("q_projective", value, basis, diagnostics=result, unit=unit)


def discord_quantumness_gap(
    rho: DensityMatrix,
    scheme: ProjectiveMeasurement,
    unit: EntropyUnit | str = EntropyUnit.BITS
) -> float:
    """S(rho||rho'_Π) - [S(B|A_Π) - S(B|A)] - S(rho_A||rho'_A) for one basis; zero in exact arithmetic."""
    unit = EntropyUnit(unit)
    _, post_state = measure_subsystem_a(rho, scheme)
    induced = relative_entropy(rho, post_state, unit).value
    discord_term = (
        conditional_entropy_measured(rho, scheme, unit).value
        - conditional_entropy_vn(rho, unit).value
    )
    marginal_term = relative_entropy(
        partial_trace(rho, Subsystem.A), partial_trace(post_state, Subsystem.A), unit
    ).value
    return induced - discord_term - marginal_term
