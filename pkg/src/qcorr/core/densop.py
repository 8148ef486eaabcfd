"""Density-operator algebra for small dense bipartite systems.

Construction and validation of density matrices, Kronecker products, partial
traces and a deterministic Hermitian eigendecomposition (cyclic Jacobi).

Subsystem ordering is A-major throughout: the basis state |a, b> sits at
index ``a * dim_b + b``.
"""

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property

import numpy as np
import numpy.typing as npt
from numba import jit

from qcorr.exceptions import (
    DimensionMismatchError,
    MissingDimsError,
    NoConvergenceError,
    NotHermitianError,
    NotPositiveError,
    NotUnitTraceError,
    ValidationError,
)

ComplexMatrix = npt.NDArray[np.complex128]

# Tolerances shared by every module
VALIDATION_TOL = 1e-10
IDENTITY_TOL = 1e-12
PHASE_TOL = 1e-8

JACOBI_TOL = 1e-14
# Trace error per dimension that summation rounding alone can produce
TRACE_ULPS = 2.0 * np.finfo(np.float64).eps
MAX_SWEEPS = 100


class Subsystem(str, Enum):
    """Label of one half of a bipartite system."""
    A = "A"
    B = "B"


@dataclass(frozen=True)
class BipartiteDims:
    """Dimensions of subsystems A and B."""
    dim_a: int
    dim_b: int

    def __post_init__(self) -> None:
        if self.dim_a < 2 or self.dim_b < 2:
            raise DimensionMismatchError(
                detail=f"Subsystem dimensions must be at least 2, got ({self.dim_a}, {self.dim_b})"
            )

    @property
    def total(self) -> int:
        return self.dim_a * self.dim_b


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues sorted descending with orthonormal eigenvector columns."""
    eigenvalues: npt.NDArray[np.float64]
    eigenvectors: ComplexMatrix
    sweeps: int = 0

    def reconstruct(self) -> ComplexMatrix:
        vecs = self.eigenvectors
        return (vecs * self.eigenvalues) @ vecs.conj().T


@dataclass(frozen=True)
class DensityMatrix:
    """Immutable density operator, optionally tagged with bipartite dims.

    Instances built directly are trusted; use :func:`validate_density` for
    untrusted matrices.
    """
    mat: ComplexMatrix
    dims: BipartiteDims | None = field(default=None)

    def __post_init__(self) -> None:
        mat = np.array(self.mat, dtype=np.complex128)
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)
        if self.dims is not None and self.dims.total != mat.shape[0]:
            raise DimensionMismatchError(
                detail=f"dims {self.dims.dim_a}x{self.dims.dim_b} do not match matrix size {mat.shape[0]}"
            )

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @cached_property
    def eig(self) -> EigenDecomposition:
        """Spectrum with eigenvalues in [-VALIDATION_TOL, 0) reported as zero."""
        decomposition = hermitian_eig(self.mat)
        values = decomposition.eigenvalues
        noise = (values < 0.0) & (values >= -VALIDATION_TOL)
        if np.any(noise):
            values = np.where(noise, 0.0, values)
            decomposition = replace(decomposition, eigenvalues=values)
        return decomposition

    def require_dims(self) -> BipartiteDims:
        if self.dims is None:
            raise MissingDimsError()
        return self.dims


@jit(nopython=True, nogil=True, cache=True)
def jacobi_sweeps(a, v, tol, max_sweeps):
    """Cyclic complex Jacobi sweeps, in place on ``a`` and ``v``.

    Each pair (p, q) is first rotated to a real off-diagonal element by a
    phase on column q, then annihilated with a real Givens rotation. Returns
    the number of sweeps used, or -1 when the budget runs out.
    """
    n = a.shape[0]
    fro = 0.0
    for i in range(n):
        for j in range(n):
            fro += abs(a[i, j]) ** 2
    fro = math.sqrt(fro)

    for sweep in range(max_sweeps):
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += abs(a[i, j]) ** 2
        if math.sqrt(off) <= tol * fro:
            return sweep

        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                phase = apq / mag
                conj_phase = phase.conjugate()
                theta = 0.5 * math.atan2(2.0 * mag, a[q, q].real - a[p, p].real)
                c = math.cos(theta)
                s = math.sin(theta)

                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * conj_phase * akq
                    a[k, q] = s * akp + c * conj_phase * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * phase * aqk
                    a[q, k] = s * apk + c * phase * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0

                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * conj_phase * vkq
                    v[k, q] = s * vkp + c * conj_phase * vkq
    return -1


def _check_square(mat: np.ndarray) -> None:
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] < 1:
        raise DimensionMismatchError(detail=f"Expected a square matrix, got shape {mat.shape}")
    if not np.all(np.isfinite(mat)):
        raise ValidationError(detail="Matrix contains non-finite entries")


def hermiticity_defect(mat: np.ndarray) -> float:
    """Largest entrywise deviation of ``mat`` from its adjoint."""
    return float(np.max(np.abs(mat - mat.conj().T)))


def fix_phases(vectors: ComplexMatrix) -> ComplexMatrix:
    """Make the first component above PHASE_TOL of each column real and positive."""
    fixed = np.array(vectors, dtype=np.complex128)
    significant = np.abs(fixed) > PHASE_TOL
    lead = np.argmax(significant, axis=0)
    pivots = fixed[lead, np.arange(fixed.shape[1])]
    phases = np.ones(fixed.shape[1], dtype=np.complex128)
    has_lead = significant.any(axis=0)
    phases[has_lead] = pivots[has_lead].conj() / np.abs(pivots[has_lead])
    return fixed * phases


def hermitian_eig(h: np.ndarray) -> EigenDecomposition:
    """Deterministic eigendecomposition of a complex Hermitian matrix.

    Args:
        h: Square matrix, Hermitian within VALIDATION_TOL.

    Returns:
        EigenDecomposition: eigenvalues descending, phase-fixed eigenvectors

    Raises:
        DimensionMismatchError: If h is not square
        NotHermitianError: If h deviates from its adjoint by more than VALIDATION_TOL
        NoConvergenceError: If the sweep budget is exhausted
    """
    mat = np.asarray(h, dtype=np.complex128)
    _check_square(mat)
    defect = hermiticity_defect(mat)
    if defect > VALIDATION_TOL:
        raise NotHermitianError(detail=f"Matrix is not Hermitian (defect {defect:.3e})", magnitude=defect)

    work = 0.5 * (mat + mat.conj().T)
    vectors = np.eye(mat.shape[0], dtype=np.complex128)
    sweeps = jacobi_sweeps(work, vectors, JACOBI_TOL, MAX_SWEEPS)
    if sweeps < 0:
        raise NoConvergenceError(detail=f"Jacobi eigensolver exceeded {MAX_SWEEPS} sweeps")

    values = np.real(np.diag(work)).copy()
    order = np.argsort(-values, kind="stable")
    return EigenDecomposition(
        eigenvalues=values[order],
        eigenvectors=fix_phases(vectors[:, order]),
        sweeps=sweeps,
    )


def validate_density(mat: np.ndarray, dims: BipartiteDims | None = None) -> DensityMatrix:
    """Check a candidate matrix and wrap it as a DensityMatrix.

    The matrix is kept bit for bit unless it needs work. Hermitian input is
    not re-symmetrized and a trace within a few ulps of one is not
    renormalized. Eigenvalues in [-VALIDATION_TOL, 0) are left in the
    matrix and reported as zero by :attr:`DensityMatrix.eig`.

    Raises:
        DimensionMismatchError: If mat is not square or disagrees with dims
        NotHermitianError: If mat is not Hermitian
        NotUnitTraceError: If the trace is not one
        NotPositiveError: If an eigenvalue is below -VALIDATION_TOL
    """
    candidate = np.asarray(mat, dtype=np.complex128)
    _check_square(candidate)
    if dims is not None and dims.total != candidate.shape[0]:
        raise DimensionMismatchError(
            detail=f"dims {dims.dim_a}x{dims.dim_b} do not match matrix size {candidate.shape[0]}"
        )

    defect = hermiticity_defect(candidate)
    if defect > VALIDATION_TOL:
        raise NotHermitianError(detail=f"Matrix is not Hermitian (defect {defect:.3e})", magnitude=defect)

    trace = np.trace(candidate)
    trace_error = abs(trace - 1.0)
    if trace_error > VALIDATION_TOL:
        raise NotUnitTraceError(
            detail=f"Trace is {trace.real:.12g}, expected 1", magnitude=float(trace_error)
        )

    hermitian = candidate if defect == 0.0 else 0.5 * (candidate + candidate.conj().T)
    if trace_error > TRACE_ULPS * candidate.shape[0]:
        hermitian = hermitian / trace.real

    density = DensityMatrix(mat=hermitian, dims=dims)
    smallest = float(density.eig.eigenvalues[-1])
    if smallest < -VALIDATION_TOL:
        raise NotPositiveError(
            detail=f"Smallest eigenvalue is {smallest:.3e}", magnitude=-smallest
        )
    return density


def tensor_product(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    """Kronecker product a ⊗ b with dims (a.dim, b.dim)."""
    return DensityMatrix(mat=np.kron(a.mat, b.mat), dims=BipartiteDims(a.dim, b.dim))


def partial_trace(rho: DensityMatrix, keep: Subsystem | str) -> DensityMatrix:
    """Reduced state of the kept subsystem.

    Raises:
        MissingDimsError: If rho has no bipartite dims
    """
    dims = rho.require_dims()
    keep = Subsystem(keep)
    blocks = rho.mat.reshape(dims.dim_a, dims.dim_b, dims.dim_a, dims.dim_b)
    if keep is Subsystem.A:
        reduced = np.einsum("ibjb->ij", blocks)
    else:
        reduced = np.einsum("aiaj->ij", blocks)
    return DensityMatrix(mat=reduced)


def maximally_mixed(dim: int, dims: BipartiteDims | None = None) -> DensityMatrix:
    return DensityMatrix(mat=np.eye(dim, dtype=np.complex128) / dim, dims=dims)


def pure_state(vector: np.ndarray, dims: BipartiteDims | None = None) -> DensityMatrix:
    """|v><v| for a (not necessarily normalized) vector."""
    ket = np.asarray(vector, dtype=np.complex128)
    ket = ket / np.linalg.norm(ket)
    return DensityMatrix(mat=np.outer(ket, ket.conj()), dims=dims)


__all__ = [
    "VALIDATION_TOL",
    "IDENTITY_TOL",
    "PHASE_TOL",
    "ComplexMatrix",
    "Subsystem",
    "BipartiteDims",
    "EigenDecomposition",
    "DensityMatrix",
    "hermitian_eig",
    "validate_density",
    "tensor_product",
    "partial_trace",
    "maximally_mixed",
    "pure_state",
    "fix_phases",
    "hermiticity_defect",
    "jacobi_sweeps",
]
