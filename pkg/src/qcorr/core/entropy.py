"""Entropy functionals on density matrices.

Values are in bits unless the caller asks for nats. The unit is always a
per-call argument; ``qcorr.config.ENTROPY_UNIT`` only supplies the default.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.stats

from qcorr import config
from qcorr.core.densop import DensityMatrix, Subsystem, partial_trace, tensor_product
from qcorr.exceptions import DimensionMismatchError, InternalConsistencyError

SUPPORT_TOL = 1e-10
FLOOR_EPS = 1e-12
MI_CROSS_CHECK_TOL = 1e-9


class EntropyUnit(str, Enum):
    """Logarithm base of reported entropies."""
    BITS = "bits"
    NATS = "nats"

    @property
    def base(self) -> float:
        return 2.0 if self is EntropyUnit.BITS else math.e

    @property
    def nats_per_unit(self) -> float:
        return math.log(2.0) if self is EntropyUnit.BITS else 1.0

    def from_nats(self, value: float) -> float:
        return value / self.nats_per_unit


DEFAULT_UNIT = EntropyUnit(config.ENTROPY_UNIT)


@dataclass(frozen=True)
class EntropyValue:
    """An entropy or relative entropy together with its unit."""
    value: float
    unit: EntropyUnit = EntropyUnit.BITS

    @property
    def finite(self) -> bool:
        return math.isfinite(self.value)

    def __float__(self) -> float:
        return self.value


def shannon_entropy(probabilities: np.ndarray, unit: EntropyUnit | str = DEFAULT_UNIT) -> float:
    """Shannon entropy of a probability vector; entries at or below zero contribute nothing."""
    unit = EntropyUnit(unit)
    probs = np.clip(np.asarray(probabilities, dtype=np.float64), 0.0, None)
    if probs.sum() <= 0.0:
        return 0.0
    return float(scipy.stats.entropy(probs, base=unit.base))


def von_neumann_entropy(rho: DensityMatrix, unit: EntropyUnit | str = DEFAULT_UNIT) -> EntropyValue:
    """S(rho) = -Tr[rho log rho] with 0 log 0 = 0."""
    unit = EntropyUnit(unit)
    return EntropyValue(shannon_entropy(rho.eig.eigenvalues, unit), unit)


def _neg_entropy_nats(rho: DensityMatrix) -> float:
    """Tr[rho log rho] in nats."""
    values = rho.eig.eigenvalues
    positive = values[values > 0.0]
    return float(np.sum(positive * np.log(positive)))


def _weights_in_basis(rho: DensityMatrix, basis: np.ndarray) -> np.ndarray:
    """Diagonal of rho in the columns of ``basis``."""
    return np.real(np.sum(basis.conj() * (rho.mat @ basis), axis=0))


def _check_same_shape(rho: DensityMatrix, sigma: DensityMatrix) -> None:
    if rho.dim != sigma.dim:
        raise DimensionMismatchError(
            detail=f"Relative entropy needs equal dimensions, got {rho.dim} and {sigma.dim}"
        )


def relative_entropy(
    rho: DensityMatrix,
    sigma: DensityMatrix,
    unit: EntropyUnit | str = DEFAULT_UNIT
) -> EntropyValue:
    """S(rho||sigma) = Tr[rho log rho] - Tr[rho log sigma].

    Returns +inf when the support of rho is not contained in the support of
    sigma: either a rho eigenvector with weight above SUPPORT_TOL has a
    sigma expectation below SUPPORT_TOL, or rho puts more than SUPPORT_TOL
    of its weight on the kernel of sigma.

    Raises:
        DimensionMismatchError: If rho and sigma differ in size
    """
    unit = EntropyUnit(unit)
    _check_same_shape(rho, sigma)

    rho_eig = rho.eig
    occupied = rho_eig.eigenvectors[:, rho_eig.eigenvalues > SUPPORT_TOL]
    if np.any(_weights_in_basis(sigma, occupied) < SUPPORT_TOL):
        return EntropyValue(math.inf, unit)

    sigma_eig = sigma.eig
    weights = _weights_in_basis(rho, sigma_eig.eigenvectors)
    kernel = sigma_eig.eigenvalues <= SUPPORT_TOL
    if weights[kernel].sum() > SUPPORT_TOL:
        return EntropyValue(math.inf, unit)

    cross = float(np.sum(weights[~kernel] * np.log(sigma_eig.eigenvalues[~kernel])))
    value = unit.from_nats(_neg_entropy_nats(rho) - cross)
    return EntropyValue(max(value, 0.0), unit)


def relative_entropy_floored(
    rho: DensityMatrix,
    sigma: DensityMatrix,
    eps: float = FLOOR_EPS,
    unit: EntropyUnit | str = DEFAULT_UNIT
) -> EntropyValue:
    """Relative entropy against sigma with its spectrum floored at eps and renormalized.

    Always finite, which is what optimizer objectives need.
    """
    unit = EntropyUnit(unit)
    _check_same_shape(rho, sigma)

    sigma_eig = sigma.eig
    floored = np.maximum(sigma_eig.eigenvalues, eps)
    floored = floored / floored.sum()
    weights = _weights_in_basis(rho, sigma_eig.eigenvectors)
    cross = float(np.sum(weights * np.log(floored)))
    value = unit.from_nats(_neg_entropy_nats(rho) - cross)
    return EntropyValue(max(value, 0.0), unit)


def mutual_information(rho: DensityMatrix, unit: EntropyUnit | str = DEFAULT_UNIT) -> EntropyValue:
    """S(A:B) = S(rho_AB || rho_A ⊗ rho_B) = S(A) + S(B) - S(AB).

    Both forms are evaluated and must agree within MI_CROSS_CHECK_TOL.

    Raises:
        MissingDimsError: If rho has no bipartite dims
        InternalConsistencyError: If the two forms disagree
    """
    unit = EntropyUnit(unit)
    rho_a = partial_trace(rho, Subsystem.A)
    rho_b = partial_trace(rho, Subsystem.B)
    entropy_sum = (
        von_neumann_entropy(rho_a, unit).value
        + von_neumann_entropy(rho_b, unit).value
        - von_neumann_entropy(rho, unit).value
    )
    divergence = relative_entropy(rho, tensor_product(rho_a, rho_b), unit).value
    if abs(divergence - entropy_sum) > MI_CROSS_CHECK_TOL:
        raise InternalConsistencyError(
            detail=f"Mutual information forms disagree: {divergence:.12g} vs {entropy_sum:.12g}",
            magnitude=abs(divergence - entropy_sum),
        )
    return EntropyValue(max(entropy_sum, 0.0), unit)


def conditional_entropy_vn(rho: DensityMatrix, unit: EntropyUnit | str = DEFAULT_UNIT) -> EntropyValue:
    """S(B|A) = S(AB) - S(A); negative for some entangled states."""
    unit = EntropyUnit(unit)
    rho_a = partial_trace(rho, Subsystem.A)
    return EntropyValue(
        von_neumann_entropy(rho, unit).value - von_neumann_entropy(rho_a, unit).value, unit
    )
