"""
Jacobi (near tri-diagonal) parametrization of PSD matrices and Hankel moments.

An ``(n+1) x (n+1)`` PSD matrix is written as ``A = D* D`` where the columns
of ``D`` are ``s0 * e0, J_1 e0, J_2 J_1 e0, ..., J_n ... J_1 e0``. The matrices
``J_k`` share the subdiagonal ``a_1..a_n`` and the diagonal ``b_0..b_{n-1}``;
``J_k`` carries free entries ``c[i, j]`` above the diagonal in its first ``k``
columns and the symmetric band ``a_j`` further right. ``J_1`` is symmetric
tri-diagonal.

The inner product is linear in the second argument, so the 2x2 case reads
``[[s0**2, s0*b0], [s0*conj(b0), |b0|**2 + a1**2]]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError, ExtractionError, RankDeficiencyError
from .matcore import (
    DEFAULT_TOL,
    Tolerances,
    as_matrix,
    is_psd,
    rel_frobenius_error,
    semidefinite_cholesky,
)


@dataclass(frozen=True)
class JacobiParameters:
    """Parameters of a near tri-diagonal model for an ``(n+1) x (n+1)`` matrix.

    Attributes
    ----------
    s0 : float
        Square root of ``A[0, 0]``.
    a : ndarray of float, shape (n,)
        ``a[k-1]`` holds ``a_k >= 0``.
    b : ndarray of complex, shape (n,)
        ``b[i]`` holds ``b_i``. The last diagonal value ``b_n`` never reaches
        the factor and is not stored.
    c : ndarray of complex, shape (n, n)
        Strictly upper-triangular, ``c[i, j]`` for ``0 <= i < j <= n-1``.
    """

    s0: float
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=float).reshape(-1)
        n = a.size
        b = np.array(self.b, dtype=np.complex128).reshape(-1)
        c = np.zeros((n, n), dtype=np.complex128) if self.c is None else np.array(self.c, dtype=np.complex128)
        if b.shape != (n,) or c.shape != (n, n):
            raise DimensionError(f"inconsistent Jacobi parameter sizes: a {a.shape}, b {b.shape}, c {c.shape}")
        s0 = float(self.s0)
        if not (np.isfinite(s0) and np.all(np.isfinite(a)) and np.all(np.isfinite(b)) and np.all(np.isfinite(c))):
            raise DomainError("Jacobi parameters must be finite")
        if s0 < 0 or np.any(a < 0):
            raise DomainError("s0 and every a_k must be >= 0")
        c = np.triu(c, 1)
        for arr in (a, b, c):
            arr.setflags(write=False)
        object.__setattr__(self, "s0", s0)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def n(self) -> int:
        return self.a.size


@dataclass(frozen=True)
class HankelMoments:
    """Moment sequence ``s_0 .. s_{2n}`` whose Hankel matrix is PSD."""

    s: np.ndarray

    def __post_init__(self):
        s = np.array(self.s, dtype=np.complex128).reshape(-1)
        if s.size == 0 or s.size % 2 == 0:
            raise DimensionError(f"need an odd number of moments s_0..s_2n, got {s.size}")
        if not np.all(np.isfinite(s)):
            raise DomainError("moments must be finite")
        s.setflags(write=False)
        object.__setattr__(self, "s", s)
        if not is_psd(self.matrix()):
            raise DomainError("Hankel matrix of the moments is not positive semidefinite")

    @property
    def order(self) -> int:
        return (self.s.size - 1) // 2

    def matrix(self) -> np.ndarray:
        N = self.order + 1
        idx = np.add.outer(np.arange(N), np.arange(N))
        return self.s[idx]


def _jk(a, b, c, k: int) -> np.ndarray:
    n = len(a)
    J = np.zeros((n + 1, n + 1), dtype=np.complex128)
    J[np.arange(n), np.arange(n)] = b
    J[np.arange(1, n + 1), np.arange(n)] = a
    for j in range(1, n + 1):
        if j <= k - 1:
            J[:j, j] = c[:j, j]
        else:
            J[j - 1, j] = a[j - 1]
    return J


def build_jk(p: JacobiParameters, k: int) -> np.ndarray:
    """The matrix ``J_k`` of the model, ``1 <= k <= n``.

    Examples
    --------
    >>> p = JacobiParameters(1.0, [0.5, 0.7], [0.1, 0.2], [[0, 0.3], [0, 0]])
    >>> build_jk(p, 2).real
    array([[0.1, 0.3, 0. ],
           [0.5, 0.2, 0.7],
           [0. , 0.7, 0. ]])
    """
    if not 1 <= k <= p.n:
        raise DimensionError(f"k must be in 1..{p.n}, got {k}")
    return _jk(p.a, p.b, p.c, k)


def jacobi_cholesky(p: JacobiParameters) -> np.ndarray:
    """Upper-triangular factor ``D = [s0 e0 | J_1 e0 | J_2 J_1 e0 | ...]``.

    Its diagonal is ``s0, a_1, a_1 a_2, ..., a_1 ... a_n``.
    """
    n = p.n
    D = np.zeros((n + 1, n + 1), dtype=np.complex128)
    D[0, 0] = p.s0
    w = np.zeros(n + 1, dtype=np.complex128)
    w[0] = 1.0
    for m in range(1, n + 1):
        w = _jk(p.a, p.b, p.c, m) @ w
        D[:, m] = w
    return D


def jacobi_reconstruct(p: JacobiParameters) -> np.ndarray:
    D = jacobi_cholesky(p)
    return D.conj().T @ D


def jacobi_determinant(p: JacobiParameters) -> float:
    """``s0**2 * prod_k (a_1 ... a_k)**2``."""
    return float(p.s0 ** 2 * np.prod(np.cumprod(p.a) ** 2))


def jacobi_extract(A, tol: Tolerances = DEFAULT_TOL) -> JacobiParameters:
    """Near tri-diagonal model of a PSD matrix.

    The upper Cholesky factor ``F`` of ``A`` is the model's factor ``D``, so the
    parameters are read column by column: column ``m`` equals ``J_m w`` with
    ``w`` the previous chain vector, which is affine in the new unknowns
    ``c[0..m-2, m-1]``, ``b_{m-1}`` and ``a_m`` with common coefficient
    ``a_1 ... a_{m-1}``.

    When that coefficient vanishes the new unknowns are set to zero and the
    final residual decides whether the model still reproduces ``A``; many
    rank-deficient matrices admit no model of this shape, which is reported
    as :class:`ExtractionError`.
    """
    F = semidefinite_cholesky(A, tol)
    H = as_matrix(A)
    n = F.shape[0] - 1
    if n < 0:
        raise DimensionError("empty matrix")
    a = np.zeros(n)
    b = np.zeros(n, dtype=np.complex128)
    c = np.zeros((n, n), dtype=np.complex128)
    w = np.zeros(n + 1, dtype=np.complex128)
    w[0] = 1.0
    for m in range(1, n + 1):
        col = F[:, m]
        v = w[m - 1].real
        if v > 0:
            for i in range(m - 1):
                known = b[i] * w[i] + c[i, i + 1:m - 1] @ w[i + 1:m - 1]
                if i >= 1:
                    known += a[i - 1] * w[i - 1]
                c[i, m - 1] = (col[i] - known) / v
            known = a[m - 2] * w[m - 2] if m >= 2 else 0.0
            b[m - 1] = (col[m - 1] - known) / v
            a[m - 1] = max(col[m].real, 0.0) / v
        w = _jk(a, b, c, m) @ w
    p = JacobiParameters(float(F[0, 0].real), a, b, c)
    err = rel_frobenius_error(jacobi_reconstruct(p), H)
    if np.linalg.norm(H) > 0 and err > tol.recon_tol:
        raise ExtractionError(
            f"no near tri-diagonal model reproduces the matrix (relative residual {err:.3e})"
        )
    return p


def _check_tridiagonal(J) -> np.ndarray:
    M = as_matrix(J)
    if M.shape[0] != M.shape[1]:
        raise DimensionError(f"J must be square, got {M.shape}")
    if np.any(np.triu(M, 2)) or np.any(np.tril(M, -2)):
        raise DomainError("J is not tri-diagonal")
    if not np.allclose(M, M.T, rtol=0, atol=1e-14 * max(1.0, float(np.abs(M).max(initial=0)))):
        raise DomainError("J is not symmetric")
    return M


def hankel_from_tridiagonal(J, s0: float, m: int) -> HankelMoments:
    """Moments ``s_0 = s0`` and ``s_k = s0 * <J^k e0, e0>`` for ``k = 1..m``.

    ``m`` must be even so that the moments fill a square Hankel matrix.
    """
    M = _check_tridiagonal(J)
    if s0 < 0:
        raise DomainError("s0 must be >= 0")
    s = np.zeros(m + 1, dtype=np.complex128)
    s[0] = s0
    v = np.zeros(M.shape[0], dtype=np.complex128)
    v[0] = 1.0
    for k in range(1, m + 1):
        v = M @ v
        s[k] = s0 * v[0]
    return HankelMoments(s)


def tridiagonal_from_hankel(h: HankelMoments, tol: Tolerances = DEFAULT_TOL):
    """Symmetric tri-diagonal ``J`` and ``s0`` reproducing the moments.

    Uses the upper Cholesky factor ``R`` of the normalized Hankel matrix:
    ``a_j = R[j, j] / R[j-1, j-1]`` and
    ``b_j = R[j, j+1] / R[j, j] - R[j-1, j] / R[j-1, j-1]``.

    If the Hankel matrix first becomes singular at order ``r + 1`` the
    moments may still come from an ``r``-point model; ``J`` is then ``r x r``
    and the remaining moments are checked against it. The trailing diagonal
    entry ``b_n`` of a full-size ``J`` is not determined by ``s_0..s_2n`` and
    is returned as zero.

    Returns
    -------
    J : ndarray
    s0 : float
    """
    s = h.s
    s0 = float(s[0].real)
    if s0 <= 0:
        raise RankDeficiencyError("leading Hankel block of order 1 is singular (s_0 = 0)", order=1)
    mu = HankelMoments(s / s0)
    R = semidefinite_cholesky(mu.matrix(), tol)
    N = R.shape[0]
    diag = R.diagonal().real
    zero = np.flatnonzero(diag == 0)
    r = int(zero[0]) if zero.size else N
    J = np.zeros((r, r), dtype=np.complex128)
    for j in range(r):
        if j + 1 < N:
            bj = R[j, j + 1] / R[j, j]
            if j >= 1:
                bj -= R[j - 1, j] / R[j - 1, j - 1]
            J[j, j] = bj
        if j >= 1:
            J[j, j - 1] = J[j - 1, j] = diag[j] / diag[j - 1]
    if r < N:
        back = hankel_from_tridiagonal(J, s0, s.size - 1).s
        if np.max(np.abs(back - s)) > tol.recon_tol * max(1.0, float(np.abs(s).max())):
            raise RankDeficiencyError(
                f"leading Hankel block of order {r + 1} is singular", order=r + 1
            )
    return J, s0
