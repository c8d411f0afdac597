"""
Quantum-state layer: density matrices, bipartite states, partial transpose,
Kraus operators from Cholesky rows, and Jacobi coordinates of qubit states.

Bipartite ordering: system A indexes the outer ``m x m`` grid of ``n x n``
blocks, i.e. ``rho`` acts on ``C^m (x) C^n`` with ``np.kron`` ordering.
Kraus matrices are vectorized row-major, so ``vec(x y^T) = kron(x, y)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, DomainError
from .matcore import (
    DEFAULT_TOL,
    Tolerances,
    as_matrix,
    is_psd,
    numerical_rank,
)
from .sc import sc_cholesky, sc_extract


class Verdict(str, enum.Enum):
    SEPARABLE = "SEPARABLE"
    ENTANGLED = "ENTANGLED"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class CertificateTerm:
    """One product term ``weight * (u u*) (x) (v v*)``."""

    weight: float
    vec_a: np.ndarray
    vec_b: np.ndarray

    def matrix(self) -> np.ndarray:
        return self.weight * np.kron(np.outer(self.vec_a, self.vec_a.conj()),
                                     np.outer(self.vec_b, self.vec_b.conj()))


@dataclass(frozen=True)
class SeparabilityVerdict:
    verdict: Verdict
    reason: str = ""
    certificate: tuple[CertificateTerm, ...] | None = None

    def __post_init__(self):
        if self.certificate is not None and self.verdict is not Verdict.SEPARABLE:
            raise DomainError("only SEPARABLE verdicts carry a certificate")

    def certificate_sum(self) -> np.ndarray | None:
        if self.certificate is None:
            return None
        return sum(t.matrix() for t in self.certificate)


@dataclass(frozen=True)
class DensityMatrix:
    """PSD matrix of unit trace."""

    mat: np.ndarray
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False, compare=False)

    def __post_init__(self):
        M = as_matrix(self.mat)
        if not is_psd(M, self.tol):
            raise DomainError("density matrix must be positive semidefinite")
        M = (M + M.conj().T) / 2
        tr = np.trace(M).real
        if abs(tr - 1.0) > self.tol.recon_tol:
            raise DomainError(f"density matrix must have unit trace, got {tr:.17g}")
        M.setflags(write=False)
        object.__setattr__(self, "mat", M)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]


@dataclass(frozen=True)
class BipartiteState:
    """Density matrix on ``C^dim_a (x) C^dim_b``."""

    dim_a: int
    dim_b: int
    rho: DensityMatrix

    def __post_init__(self):
        if not isinstance(self.rho, DensityMatrix):
            object.__setattr__(self, "rho", DensityMatrix(self.rho))
        if self.dim_a < 1 or self.dim_b < 1 or self.dim_a * self.dim_b != self.rho.dim:
            raise DimensionError(
                f"dims {self.dim_a}x{self.dim_b} do not factor a state of dimension {self.rho.dim}"
            )

    @classmethod
    def from_matrix(cls, mat, dim_a: int, dim_b: int, tol: Tolerances = DEFAULT_TOL):
        return cls(dim_a, dim_b, DensityMatrix(mat, tol))

    @property
    def mat(self) -> np.ndarray:
        return self.rho.mat


@dataclass(frozen=True)
class KrausSet:
    """Kraus operators ``K_k`` (``dim_a x dim_b``) with ``sum vec(K) vec(K)* = rho``."""

    ops: tuple[np.ndarray, ...]

    def state_sum(self) -> np.ndarray:
        if not self.ops:
            return np.zeros((0, 0), dtype=np.complex128)
        return sum(np.outer(K.reshape(-1), K.reshape(-1).conj()) for K in self.ops)


@dataclass(frozen=True)
class QubitJacobiCoords:
    """Jacobi coordinates ``(s0, a1, b0)`` of a qubit state."""

    s0: float
    a1: float
    b0: complex

    def as_tuple(self):
        return (self.s0, self.a1, self.b0.real, self.b0.imag)

    def hemisphere_point(self):
        """Point ``(Re b0, Im b0, s0)`` in R^3; pure states lie on the unit upper hemisphere."""
        return (self.b0.real, self.b0.imag, self.s0)


def partial_transpose_b(s: BipartiteState) -> np.ndarray:
    """Transpose every ``dim_b x dim_b`` block in place."""
    m, n = s.dim_a, s.dim_b
    T = s.mat.reshape(m, n, m, n).transpose(0, 3, 2, 1)
    return T.reshape(m * n, m * n).copy()


def min_pt_eigenvalue(s: BipartiteState) -> float:
    PT = partial_transpose_b(s)
    return float(np.linalg.eigvalsh((PT + PT.conj().T) / 2)[0])


def ppt_verdict(s: BipartiteState, tol: Tolerances = DEFAULT_TOL) -> SeparabilityVerdict:
    """Peres-Horodecki test; decisive for 2x2 and 2x3 (either order)."""
    lam = min_pt_eigenvalue(s)
    if lam < -tol.psd_eig_tol:
        return SeparabilityVerdict(Verdict.ENTANGLED, f"partial transpose has eigenvalue {lam:.6g}")
    if sorted((s.dim_a, s.dim_b)) in ([2, 2], [2, 3]) or min(s.dim_a, s.dim_b) == 1:
        return SeparabilityVerdict(Verdict.SEPARABLE, "PPT holds and PPT is sufficient in these dimensions")
    return SeparabilityVerdict(Verdict.INCONCLUSIVE, f"PPT holds but is not sufficient for {s.dim_a}x{s.dim_b}")


def kraus_from_state(s: BipartiteState, tol: Tolerances = DEFAULT_TOL) -> KrausSet:
    """Kraus operators of the dual channel from the SC Cholesky factor.

    Row ``k`` of the factor ``F`` (``rho = F* F``) is ``vec(K_k)*``; zero rows
    are dropped.
    """
    F = sc_cholesky(sc_extract(s.mat, tol))
    ops = []
    for row in F:
        if np.any(row != 0):
            ops.append(row.conj().reshape(s.dim_a, s.dim_b))
    return KrausSet(tuple(ops))


def kraus_rows(s: BipartiteState, tol: Tolerances = DEFAULT_TOL) -> list[np.ndarray]:
    """All Kraus matrices, one per factor row, zero rows included."""
    F = sc_cholesky(sc_extract(s.mat, tol))
    return [row.conj().reshape(s.dim_a, s.dim_b) for row in F]


def qubit_to_jacobi(rho, tol: Tolerances = DEFAULT_TOL) -> QubitJacobiCoords:
    """Jacobi coordinates of a qubit density matrix.

    When ``s0 = 0`` the convention ``b0 = 1`` is applied, which places
    ``|down>`` at ``(0, 0, 1)``.
    """
    dm = rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho, tol)
    if dm.dim != 2:
        raise DimensionError(f"qubit state must be 2x2, got {dm.dim}")
    A = dm.mat
    a00, a11 = float(A[0, 0].real), float(A[1, 1].real)
    if a00 <= 0.0:
        return QubitJacobiCoords(0.0, 0.0, 1.0 + 0.0j)
    s0 = np.sqrt(a00)
    b0 = complex(A[0, 1]) / s0
    if abs(b0) ** 2 > a11:
        # rounding on a nearly pure state with tiny s0
        b0 *= np.sqrt(max(a11, 0.0)) / abs(b0)
    a1_sq = a11 - abs(b0) ** 2
    a1 = 0.0 if a1_sq <= tol.psd_eig_tol else float(np.sqrt(a1_sq))
    return QubitJacobiCoords(float(s0), a1, b0)


def jacobi_to_qubit(q: QubitJacobiCoords, tol: Tolerances = DEFAULT_TOL) -> DensityMatrix:
    """``[[s0^2, s0 b0], [s0 conj(b0), |b0|^2 + a1^2]]``."""
    s0, a1, b0 = float(q.s0), float(q.a1), complex(q.b0)
    if s0 < 0 or a1 < 0:
        raise DomainError("s0 and a1 must be >= 0")
    r = s0 ** 2 + a1 ** 2 + abs(b0) ** 2
    if abs(r - 1.0) > tol.recon_tol:
        raise DomainError(f"coordinates violate s0^2 + a1^2 + |b0|^2 = 1 (got {r:.17g})")
    M = np.array([[s0 ** 2, s0 * b0], [s0 * b0.conjugate(), abs(b0) ** 2 + a1 ** 2]])
    return DensityMatrix(M, tol)


def qubit_is_pure(q: QubitJacobiCoords, tol: Tolerances = DEFAULT_TOL) -> bool:
    return q.a1 <= tol.rank_tol


def kraus_rank(K, tol: Tolerances = DEFAULT_TOL) -> int:
    return numerical_rank(K, tol)
