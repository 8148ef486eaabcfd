"""Named two-qubit state families.

|±> = (|0> ± |1>)/√2 and |φ±> = (|00> ± |11>)/√2. Matrices are written
entry by entry so that e.g. bell_mixture(1) is exactly |φ+><φ+|.
"""

import numpy as np

from qcorr.core.densop import BipartiteDims, DensityMatrix, tensor_product
from qcorr.exceptions import OutOfRangeError

TWO_QUBITS = BipartiteDims(2, 2)


def _check_probability(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise OutOfRangeError(detail=f"p must lie in [0, 1], got {p}", magnitude=float(p))
    return float(p)


def bell_mixture(p: float) -> DensityMatrix:
    """p |φ+><φ+| + (1-p) |φ-><φ-|."""
    p = _check_probability(p)
    coherence = (2.0 * p - 1.0) / 2.0
    mat = np.zeros((4, 4), dtype=np.complex128)
    mat[0, 0] = mat[3, 3] = 0.5
    mat[0, 3] = mat[3, 0] = coherence
    return DensityMatrix(mat, TWO_QUBITS)


def pure_bell() -> DensityMatrix:
    return bell_mixture(1.0)


def nonorthogonal_sep(p: float) -> DensityMatrix:
    """p |00><00| + (1-p) |++><++|."""
    p = _check_probability(p)
    mat = np.full((4, 4), (1.0 - p) / 4.0, dtype=np.complex128)
    mat[0, 0] += p
    return DensityMatrix(mat, TWO_QUBITS)


def werner(p: float) -> DensityMatrix:
    """p |ψ-><ψ-| + (1-p) I/4 with |ψ-> = (|01> - |10>)/√2."""
    p = _check_probability(p)
    mat = np.eye(4, dtype=np.complex128) * (1.0 - p) / 4.0
    mat[1, 1] += p / 2.0
    mat[2, 2] += p / 2.0
    mat[1, 2] -= p / 2.0
    mat[2, 1] -= p / 2.0
    return DensityMatrix(mat, TWO_QUBITS)


def partially_entangled(theta: float) -> DensityMatrix:
    """cos θ |00> + sin θ |11>."""
    ket = np.zeros(4, dtype=np.complex128)
    ket[0], ket[3] = np.cos(theta), np.sin(theta)
    return DensityMatrix(np.outer(ket, ket.conj()), TWO_QUBITS)


def product(rho_a: DensityMatrix, rho_b: DensityMatrix) -> DensityMatrix:
    return tensor_product(rho_a, rho_b)
