"""Derivative-free minimization and the separable-state search space.

The simplex method uses reflection, expansion, contraction and shrink
coefficients (1, 2, 0.5, 0.5). Restarts draw their start points from
``numpy.random.default_rng(restart_seed(master_seed, index))`` where

    restart_seed(s, i) = SeedSequence([s, i]).generate_state(1, uint64)[0]

so a restart's trajectory depends only on the master seed and its index,
whether restarts run serially or on a thread pool.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Callable, Optional

import numpy as np
import scipy.special
from numba import jit

from qcorr.api.models import OptimizerConfig
from qcorr.core.densop import JACOBI_TOL, MAX_SWEEPS, BipartiteDims, ComplexMatrix, DensityMatrix, jacobi_sweeps
from qcorr.core.entropy import FLOOR_EPS, EntropyUnit, relative_entropy_floored, von_neumann_entropy
from qcorr.exceptions import BadParamLengthError, DimensionMismatchError, OutOfRangeError

logger = logging.getLogger(__name__)

Objective = Callable[[np.ndarray], float]
Sampler = Callable[[np.random.Generator, int], np.ndarray]
LocalSearch = Callable[[Objective, np.ndarray, OptimizerConfig], "OptResult"]

REFLECT, EXPAND, CONTRACT, SHRINK = 1.0, 2.0, 0.5, 0.5
MIN_STEP = 0.05
RELATIVE_STEP = 0.05


@dataclass(frozen=True)
class StageRecord:
    """Outcome of one penalty stage of a constrained search."""
    penalty: float
    value: float
    relative_entropy: float
    residual: float


@dataclass(frozen=True)
class OptResult:
    """Best point found by a minimization, with diagnostics."""
    best_value: float
    best_params: np.ndarray
    restart_index: int = 0
    evaluations: int = 0
    iterations: int = 0
    converged: bool = False
    constraint_residual: Optional[float] = None
    restart_values: tuple[float, ...] = ()
    restart_params: tuple[np.ndarray, ...] = ()
    stages: tuple[StageRecord, ...] = ()


def restart_seed(master_seed: int, index: int) -> int:
    """Per-restart seed mixed from the master seed and the restart index."""
    state = np.random.SeedSequence([master_seed, index]).generate_state(1, dtype=np.uint64)
    return int(state[0])


class _CountingObjective:
    """Wraps an objective, counting calls and mapping NaN to +inf."""

    def __init__(self, objective: Objective) -> None:
        self.objective = objective
        self.calls = 0

    def __call__(self, x: np.ndarray) -> float:
        self.calls += 1
        value = float(self.objective(x))
        return math.inf if math.isnan(value) else value


def nelder_mead_minimize(objective: Objective, x0: np.ndarray, config: OptimizerConfig) -> OptResult:
    """Minimize with the Nelder-Mead simplex method.

    The initial simplex is x0 plus one vertex per coordinate, displaced by
    max(0.05, 0.05 |x0_i|). Stops when the simplex diameter (largest
    infinity-norm distance from the best vertex) drops below xtol, when the
    value spread drops below ftol, or after max_iters iterations.
    Infinite objective values are allowed and simply lose every comparison.
    """
    func = _CountingObjective(objective)
    start = np.asarray(x0, dtype=np.float64).ravel().copy()
    dim = start.size

    simplex = np.tile(start, (dim + 1, 1))
    for i in range(dim):
        simplex[i + 1, i] += max(MIN_STEP, RELATIVE_STEP * abs(start[i]))
    values = np.array([func(vertex) for vertex in simplex])

    iterations = 0
    converged = False
    while True:
        order = np.argsort(values, kind="stable")
        simplex, values = simplex[order], values[order]

        diameter = float(np.max(np.abs(simplex[1:] - simplex[0]))) if dim else 0.0
        spread = values[-1] - values[0]
        if diameter < config.xtol or (math.isfinite(spread) and spread < config.ftol):
            converged = True
            break
        if iterations >= config.max_iters:
            break
        iterations += 1

        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        reflected = centroid + REFLECT * (centroid - worst)
        f_reflected = func(reflected)

        if values[0] <= f_reflected < values[-2]:
            simplex[-1], values[-1] = reflected, f_reflected
            continue

        if f_reflected < values[0]:
            expanded = centroid + EXPAND * (reflected - centroid)
            f_expanded = func(expanded)
            if f_expanded < f_reflected:
                simplex[-1], values[-1] = expanded, f_expanded
            else:
                simplex[-1], values[-1] = reflected, f_reflected
            continue

        if f_reflected < values[-1]:
            contracted = centroid + CONTRACT * (reflected - centroid)
            f_contracted = func(contracted)
            if f_contracted <= f_reflected:
                simplex[-1], values[-1] = contracted, f_contracted
                continue
        else:
            contracted = centroid + CONTRACT * (worst - centroid)
            f_contracted = func(contracted)
            if f_contracted < values[-1]:
                simplex[-1], values[-1] = contracted, f_contracted
                continue

        simplex[1:] = simplex[0] + SHRINK * (simplex[1:] - simplex[0])
        values[1:] = [func(vertex) for vertex in simplex[1:]]

    return OptResult(
        best_value=float(values[0]),
        best_params=simplex[0].copy(),
        evaluations=func.calls,
        iterations=iterations,
        converged=converged,
    )


def _merge(results: list[OptResult]) -> OptResult:
    """Minimum by value, ties to the lowest restart index."""
    def key(indexed: tuple[int, OptResult]) -> tuple[float, int]:
        index, result = indexed
        value = result.best_value
        return (math.inf if math.isnan(value) else value, index)

    best_index, best = min(enumerate(results), key=key)
    return replace(
        best,
        restart_index=best_index,
        evaluations=sum(result.evaluations for result in results),
        restart_values=tuple(result.best_value for result in results),
        restart_params=tuple(result.best_params for result in results),
    )


def multi_restart(
    objective: Objective,
    sampler: Sampler,
    config: OptimizerConfig,
    local_search: Optional[LocalSearch] = None
) -> OptResult:
    """Run config.restarts independent local searches and keep the best.

    Args:
        objective: Function to minimize
        sampler: Maps (rng, restart index) to a start point
        config: Restarts, seed, tolerances and worker count
        local_search: Defaults to :func:`nelder_mead_minimize`

    Returns:
        OptResult: the best restart, with per-restart values and end points in
        restart_values and restart_params
    """
    search = local_search or nelder_mead_minimize

    def run(index: int) -> OptResult:
        rng = np.random.default_rng(restart_seed(config.seed, index))
        result = search(objective, sampler(rng, index), config)
        logger.debug(
            "restart %d: value=%.12g converged=%s evaluations=%d",
            index, result.best_value, result.converged, result.evaluations,
        )
        return result

    indices = range(config.restarts)
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(run, indices))
    else:
        results = [run(index) for index in indices]
    return _merge(results)


@dataclass(frozen=True)
class SeparableAnsatz:
    """K pure product terms; weights are the softmax of ``weights_raw``."""
    weights_raw: np.ndarray
    a_vectors: ComplexMatrix
    b_vectors: ComplexMatrix

    @property
    def terms(self) -> int:
        return self.weights_raw.size

    @property
    def dims(self) -> BipartiteDims:
        return BipartiteDims(self.a_vectors.shape[1], self.b_vectors.shape[1])

    @cached_property
    def weights(self) -> np.ndarray:
        return scipy.special.softmax(self.weights_raw)

    @cached_property
    def unit_a(self) -> ComplexMatrix:
        return _normalize_rows(self.a_vectors)

    @cached_property
    def unit_b(self) -> ComplexMatrix:
        return _normalize_rows(self.b_vectors)

    @staticmethod
    def param_count(dims: BipartiteDims, terms: int) -> int:
        return terms * (1 + 2 * dims.dim_a + 2 * dims.dim_b)

    @classmethod
    def from_params(cls, params: np.ndarray, dims: BipartiteDims, terms: int) -> "SeparableAnsatz":
        """Layout: K raw weights, then per term Re a, Im a, Re b, Im b."""
        values = np.asarray(params, dtype=np.float64).ravel()
        if values.size != cls.param_count(dims, terms):
            raise BadParamLengthError(
                detail=f"Expected {cls.param_count(dims, terms)} ansatz parameters, got {values.size}"
            )
        da, db = dims.dim_a, dims.dim_b
        body = values[terms:].reshape(terms, 2 * da + 2 * db)
        return cls(
            weights_raw=values[:terms].copy(),
            a_vectors=body[:, :da] + 1j * body[:, da:2 * da],
            b_vectors=body[:, 2 * da:2 * da + db] + 1j * body[:, 2 * da + db:],
        )

    def to_params(self) -> np.ndarray:
        body = np.hstack([
            self.a_vectors.real, self.a_vectors.imag, self.b_vectors.real, self.b_vectors.imag
        ])
        return np.concatenate([self.weights_raw, body.ravel()])


def _normalize_rows(vectors: ComplexMatrix) -> ComplexMatrix:
    rows = np.array(vectors, dtype=np.complex128)
    norms = np.linalg.norm(rows, axis=1)
    empty = norms == 0.0
    rows[empty] = 0.0
    rows[empty, 0] = 1.0
    norms[empty] = 1.0
    return rows / norms[:, None]


def b_mixture(ansatz: SeparableAnsatz) -> ComplexMatrix:
    """Σ_i p_i |b_i><b_i|, the B marginal of the ansatz state."""
    unit_b = ansatz.unit_b
    return np.einsum("k,kb,kd->bd", ansatz.weights, unit_b, unit_b.conj())


def ansatz_to_state(ansatz: SeparableAnsatz) -> DensityMatrix:
    """Σ_i p_i |a_i><a_i| ⊗ |b_i><b_i| as a density matrix with dims."""
    dims = ansatz.dims
    # Row k is a_k ⊗ b_k in A-major order
    products = (ansatz.unit_a[:, :, None] * ansatz.unit_b[:, None, :]).reshape(ansatz.terms, dims.total)
    mat = (products.T * ansatz.weights) @ products.conj()
    return DensityMatrix(0.5 * (mat + mat.conj().T), dims)


def marginal_residual(ansatz: SeparableAnsatz, target_b: DensityMatrix) -> float:
    """Frobenius distance between the ansatz B marginal and target_b.

    Raises:
        DimensionMismatchError: If the dimensions of B differ
    """
    if ansatz.dims.dim_b != target_b.dim:
        raise DimensionMismatchError(
            detail=f"Ansatz acts on dim_b={ansatz.dims.dim_b}, target has dimension {target_b.dim}"
        )
    return float(np.linalg.norm(b_mixture(ansatz) - target_b.mat))


def penalized_q_objective(
    rho: DensityMatrix,
    target_b: DensityMatrix,
    lam: float,
    terms: int,
    unit: EntropyUnit | str = EntropyUnit.BITS
) -> Objective:
    """Ansatz parameters -> floored S(rho||sigma) + lam * residual².

    ``lam = 0`` gives the unconstrained objective of the relative entropy of
    entanglement.
    """
    if lam < 0:
        raise OutOfRangeError(detail=f"Penalty weight must be non-negative, got {lam}", magnitude=lam)
    dims = rho.require_dims()
    if target_b.dim != dims.dim_b:
        raise DimensionMismatchError(
            detail=f"State acts on dim_b={dims.dim_b}, target has dimension {target_b.dim}"
        )
    expected = SeparableAnsatz.param_count(dims, terms)
    neg_entropy = -von_neumann_entropy(rho, EntropyUnit.NATS).value
    nats_per_unit = EntropyUnit(unit).nats_per_unit
    rho_mat = np.ascontiguousarray(rho.mat)
    target_mat = np.ascontiguousarray(target_b.mat)

    def objective(params: np.ndarray) -> float:
        values = np.asarray(params, dtype=np.float64).ravel()
        if values.size != expected:
            raise BadParamLengthError(detail=f"Expected {expected} ansatz parameters, got {values.size}")
        return float(_penalized_value(
            values, rho_mat, neg_entropy, target_mat, float(lam),
            terms, dims.dim_a, dims.dim_b, FLOOR_EPS, nats_per_unit,
        ))

    return objective


@jit(nopython=True, nogil=True, cache=True)
def _penalized_value(params, rho_mat, neg_entropy, target_b, lam, terms, dim_a, dim_b, eps, nats_per_unit):
    """Compiled ansatz -> floored relative entropy + lam * residual².

    Mirrors SeparableAnsatz.from_params, ansatz_to_state,
    relative_entropy_floored and marginal_residual. Returns inf when the
    eigensolver runs out of sweeps.
    """
    total = dim_a * dim_b
    width = 2 * dim_a + 2 * dim_b

    raw = params[:terms]
    weights = np.exp(raw - raw.max())
    weights = weights / weights.sum()

    products = np.zeros((terms, total), dtype=np.complex128)
    b_mix = np.zeros((dim_b, dim_b), dtype=np.complex128)
    for k in range(terms):
        base = terms + k * width
        a = params[base:base + dim_a] + 1j * params[base + dim_a:base + 2 * dim_a]
        b = params[base + 2 * dim_a:base + 2 * dim_a + dim_b] + 1j * params[base + 2 * dim_a + dim_b:base + width]
        norm_a = np.sqrt(np.sum(np.abs(a) ** 2))
        norm_b = np.sqrt(np.sum(np.abs(b) ** 2))
        if norm_a == 0.0:
            a = np.zeros(dim_a, dtype=np.complex128)
            a[0] = 1.0
            norm_a = 1.0
        if norm_b == 0.0:
            b = np.zeros(dim_b, dtype=np.complex128)
            b[0] = 1.0
            norm_b = 1.0
        a = a / norm_a
        b = b / norm_b
        for i in range(dim_a):
            for j in range(dim_b):
                products[k, i * dim_b + j] = a[i] * b[j]
        for i in range(dim_b):
            for j in range(dim_b):
                b_mix[i, j] += weights[k] * b[i] * np.conj(b[j])

    sigma = np.zeros((total, total), dtype=np.complex128)
    for k in range(terms):
        for i in range(total):
            for j in range(total):
                sigma[i, j] += weights[k] * products[k, i] * np.conj(products[k, j])
    for i in range(total):
        for j in range(i, total):
            mean = 0.5 * (sigma[i, j] + np.conj(sigma[j, i]))
            sigma[i, j] = mean
            sigma[j, i] = np.conj(mean)

    vectors = np.zeros((total, total), dtype=np.complex128)
    for i in range(total):
        vectors[i, i] = 1.0
    if jacobi_sweeps(sigma, vectors, JACOBI_TOL, MAX_SWEEPS) < 0:
        return np.inf

    floored = np.empty(total)
    for j in range(total):
        floored[j] = max(sigma[j, j].real, eps)
    floored = floored / floored.sum()

    cross = 0.0
    for j in range(total):
        weight = 0.0
        for i in range(total):
            for m in range(total):
                weight += (np.conj(vectors[i, j]) * rho_mat[i, m] * vectors[m, j]).real
        cross += weight * np.log(floored[j])
    value = max((neg_entropy - cross) / nats_per_unit, 0.0)

    if lam != 0.0:
        residual = 0.0
        for i in range(dim_b):
            for j in range(dim_b):
                residual += abs(b_mix[i, j] - target_b[i, j]) ** 2
        value += lam * residual
    return value


def penalty_continuation(
    rho: DensityMatrix,
    target_b: DensityMatrix,
    terms: int,
    unit: EntropyUnit | str = EntropyUnit.BITS
) -> LocalSearch:
    """Local search that re-minimizes along config.penalty_schedule with warm starts.

    Every stage but the last minimizes the penalized objective at its own
    penalty. The last stage minimizes the objective handed in by
    :func:`multi_restart`, which should be the penalized objective at
    ``config.penalty_schedule[-1]``. The returned OptResult is the final
    stage's, with evaluations summed over stages and one StageRecord per stage.
    """
    dims = rho.require_dims()

    def search(objective: Objective, x0: np.ndarray, config: OptimizerConfig) -> OptResult:
        point = np.asarray(x0, dtype=np.float64)
        stages: list[StageRecord] = []
        evaluations = 0
        result: Optional[OptResult] = None
        last = len(config.penalty_schedule) - 1
        for stage, lam in enumerate(config.penalty_schedule):
            if stage == last:
                stage_objective = objective
            else:
                stage_objective = penalized_q_objective(rho, target_b, lam, terms, unit)
            result = nelder_mead_minimize(stage_objective, point, config)
            evaluations += result.evaluations
            point = result.best_params
            ansatz = SeparableAnsatz.from_params(point, dims, terms)
            stages.append(StageRecord(
                penalty=lam,
                value=result.best_value,
                relative_entropy=relative_entropy_floored(rho, ansatz_to_state(ansatz), FLOOR_EPS, unit).value,
                residual=marginal_residual(ansatz, target_b),
            ))
        return replace(
            result,
            evaluations=evaluations,
            constraint_residual=stages[-1].residual,
            stages=tuple(stages),
        )

    return search


def random_ansatz_params(rng: np.random.Generator, dims: BipartiteDims, terms: int) -> np.ndarray:
    """Standard-normal ansatz parameters."""
    return rng.standard_normal(SeparableAnsatz.param_count(dims, terms))


__all__ = [
    "OptResult",
    "StageRecord",
    "SeparableAnsatz",
    "restart_seed",
    "nelder_mead_minimize",
    "multi_restart",
    "ansatz_to_state",
    "b_mixture",
    "marginal_residual",
    "penalized_q_objective",
    "penalty_continuation",
    "random_ansatz_params",
]
