"""
Tolerance-aware dense complex matrix kernel.

Every routine here takes plain ``numpy`` arrays and returns new arrays;
inputs are never modified. Tolerances are relative and bundled in
:class:`Tolerances`.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError


@dataclass(frozen=True)
class Tolerances:
    """Relative tolerances used throughout the package.

    Parameters
    ----------
    psd_eig_tol : float
        Eigenvalue floor, relative to the spectral norm.
    rank_tol : float
        Singular value cutoff, relative to the largest singular value.
    recon_tol : float
        Relative Frobenius tolerance for round-trip reconstructions.
    """

    psd_eig_tol: float = 1e-10
    rank_tol: float = 1e-10
    recon_tol: float = 1e-8

    def __post_init__(self):
        for name in ("psd_eig_tol", "rank_tol", "recon_tol"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise DomainError(f"tolerance {name} must be finite and >= 0, got {value}")

    @classmethod
    def from_env(cls, environ=None) -> "Tolerances":
        """Build tolerances from ``POSPARAM_TOL_{PSD,RANK,RECON}`` variables."""
        environ = os.environ if environ is None else environ
        kwargs = {}
        for key, field in (("PSD", "psd_eig_tol"), ("RANK", "rank_tol"), ("RECON", "recon_tol")):
            raw = environ.get(f"POSPARAM_TOL_{key}")
            if raw is not None:
                kwargs[field] = float(raw)
        return cls(**kwargs)


DEFAULT_TOL = Tolerances()


def as_matrix(A) -> np.ndarray:
    """Return ``A`` as a finite 2-D complex128 array (a copy)."""
    M = np.array(A, dtype=np.complex128)
    if M.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise DomainError("matrix has non-finite entries")
    return M


def _square(A) -> np.ndarray:
    M = as_matrix(A)
    if M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")
    return M


def _scale(M: np.ndarray) -> float:
    if M.size == 0:
        return 1.0
    return max(1.0, float(np.linalg.norm(M, 2)))


def hermitian_part(A, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Symmetrize ``A`` as ``(A + A*)/2`` after checking it is Hermitian within tolerance."""
    M = _square(A)
    skew = float(np.max(np.abs(M - M.conj().T))) if M.size else 0.0
    if skew > tol.psd_eig_tol * _scale(M):
        raise DomainError(f"matrix is not Hermitian (max |A - A*| = {skew:.3e})")
    return (M + M.conj().T) / 2


def is_hermitian(A, tol: Tolerances = DEFAULT_TOL) -> bool:
    M = _square(A)
    try:
        hermitian_part(M, tol)
    except DomainError:
        return False
    return True


def is_psd(A, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Check whether ``A`` is positive semidefinite within tolerance.

    ``A`` must be Hermitian within ``psd_eig_tol`` and every eigenvalue must be
    at least ``-psd_eig_tol * max(1, ||A||_2)``.

    Examples
    --------
    >>> is_psd(np.eye(2))
    True
    >>> is_psd([[1, 2], [2, 1]])
    False
    """
    M = _square(A)
    if M.size == 0:
        return True
    if not is_hermitian(M, tol):
        return False
    H = (M + M.conj().T) / 2
    w = np.linalg.eigvalsh(H)
    return bool(w[0] >= -tol.psd_eig_tol * _scale(H))


def require_psd(A, tol: Tolerances = DEFAULT_TOL, what: str = "matrix") -> np.ndarray:
    """Return the symmetrized PSD matrix or raise :class:`DomainError`."""
    M = _square(A)
    if not is_psd(M, tol):
        raise DomainError(f"{what} is not positive semidefinite")
    return (M + M.conj().T) / 2


def eigh_psd(A, tol: Tolerances = DEFAULT_TOL):
    """Eigendecomposition of a PSD matrix with eigenvalues clamped at zero."""
    H = require_psd(A, tol)
    w, V = np.linalg.eigh(H)
    return np.clip(w, 0.0, None), V


def principal_sqrt(A, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Unique PSD square root of a PSD matrix."""
    w, V = eigh_psd(A, tol)
    return (V * np.sqrt(w)) @ V.conj().T


def pinv_sqrt(A, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose pseudo-inverse of :func:`principal_sqrt`.

    Eigenvalues at or below ``rank_tol`` times the largest eigenvalue are
    treated as zero.
    """
    w, V = eigh_psd(A, tol)
    if w.size == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    cutoff = tol.rank_tol * w.max()
    inv = np.zeros_like(w)
    keep = w > cutoff
    inv[keep] = 1.0 / np.sqrt(w[keep])
    return (V * inv) @ V.conj().T


def _cholesky_upper(H: np.ndarray, floor: float) -> np.ndarray:
    # H Hermitian; pivots <= floor give a zero row.
    n = H.shape[0]
    S = H.copy()
    F = np.zeros_like(S)
    for k in range(n):
        p = S[k, k].real
        if p <= floor:
            continue
        r = np.sqrt(p)
        F[k, k] = r
        F[k, k + 1:] = S[k, k + 1:] / r
        row = F[k, k + 1:]
        S[k + 1:, k + 1:] -= np.outer(row.conj(), row)
    return F


def cholesky_floor(H: np.ndarray, tol: Tolerances) -> float:
    """Pivot floor used by the semidefinite Cholesky factorization."""
    if H.size == 0:
        return 0.0
    return tol.psd_eig_tol * float(np.max(np.abs(np.diag(H).real)))


def semidefinite_cholesky(A, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Upper-triangular ``F`` with ``F* F = A`` for a PSD ``A``.

    No pivoting is performed. When a pivot falls to or below the floor
    ``psd_eig_tol * max(diag(A))`` the corresponding row of ``F`` is zero,
    so the factor keeps the same index order as ``A``.

    Examples
    --------
    >>> semidefinite_cholesky([[1, 1], [1, 1]]).real
    array([[1., 1.],
           [0., 0.]])
    """
    H = require_psd(A, tol)
    return _cholesky_upper(H, cholesky_floor(H, tol))


def numerical_rank(A, tol: Tolerances = DEFAULT_TOL) -> int:
    """Number of singular values above ``rank_tol`` times the largest one."""
    M = as_matrix(A)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol.rank_tol * s[0]))


def rel_frobenius_error(X, Y) -> float:
    """``||X - Y||_F / max(||Y||_F, tiny)``."""
    X = np.asarray(X)
    Y = np.asarray(Y)
    denom = max(float(np.linalg.norm(Y)), np.finfo(float).tiny)
    return float(np.linalg.norm(X - Y)) / denom
