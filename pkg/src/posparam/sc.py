"""
Schur-Constantinescu (SC) parameters of positive semidefinite matrices.

A PSD matrix ``A`` with scalar entries is encoded by its diagonal and a table
of contractions ``gammas[i, j]`` (``i < j``, unit disc). Indices are 0-based in
Python; the JSON form in :mod:`posparam.io` uses 1-based indices.

The extraction is anchored at the bottom-right corner: the trailing 2x2 block
gives the last contraction, and each earlier row ``k`` is written as
``A[k, k+1:] = sqrt(A[k, k]) * R_k @ L_{k+1}`` where ``L_{k+1}`` is the upper
Cholesky factor of the trailing block and ``R_k`` a row contraction, which is
then peeled into individual contractions through its defect chain.

For scalar matrices ``gammas[i, j]`` is the partial correlation of variables
``i`` and ``j`` given the variables strictly between them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import DecompositionError, DimensionError, DomainError, ExtractionError
from .matcore import (
    DEFAULT_TOL,
    Tolerances,
    _cholesky_upper,
    as_matrix,
    cholesky_floor,
    pinv_sqrt,
    principal_sqrt,
    require_psd,
    semidefinite_cholesky,
)


@dataclass(frozen=True)
class SCParameters:
    """Diagonal values and contraction table of a PSD matrix.

    Attributes
    ----------
    diag : ndarray of float, shape (n,)
        The diagonal entries ``A[i, i] >= 0``.
    gammas : ndarray of complex, shape (n, n)
        Strictly upper-triangular table of contractions; entries on or below
        the diagonal are zero.
    """

    diag: np.ndarray
    gammas: np.ndarray

    def __post_init__(self):
        d = np.array(self.diag, dtype=float).reshape(-1)
        g = np.array(self.gammas, dtype=np.complex128)
        n = d.size
        if g.shape != (n, n):
            raise DimensionError(f"gammas must have shape {(n, n)}, got {g.shape}")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(g))):
            raise DomainError("SC parameters must be finite")
        if np.any(d < 0):
            raise DomainError("SC diagonal entries must be >= 0")
        g = np.triu(g, 1)
        if np.any(np.abs(g) > 1 + 1e-12):
            raise DomainError("SC parameters must lie in the closed unit disc")
        g = _clamp_disc(g)
        zero = d == 0
        g[zero, :] = 0
        g[:, zero] = 0
        d.setflags(write=False)
        g.setflags(write=False)
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "gammas", g)

    @property
    def n(self) -> int:
        return self.diag.size

    def gamma(self, i: int, j: int) -> complex:
        """Contraction with 1-based indices ``i < j``."""
        if not 1 <= i < j <= self.n:
            raise IndexError(f"need 1 <= i < j <= {self.n}, got ({i}, {j})")
        return complex(self.gammas[i - 1, j - 1])


@dataclass(frozen=True)
class BlockContraction:
    """Contraction ``gamma`` with its defect operators."""

    gamma: np.ndarray
    defect: np.ndarray
    defect_adj: np.ndarray

    @classmethod
    def from_gamma(cls, gamma, tol: Tolerances = DEFAULT_TOL) -> "BlockContraction":
        G = as_matrix(np.atleast_2d(gamma))
        p, q = G.shape
        defect = principal_sqrt(np.eye(q) - G.conj().T @ G, tol)
        defect_adj = principal_sqrt(np.eye(p) - G @ G.conj().T, tol)
        return cls(G, defect, defect_adj)


def _clamp_disc(g: np.ndarray) -> np.ndarray:
    g = np.array(g, dtype=np.complex128)
    mag = np.abs(g)
    over = mag > 1
    g[over] = g[over] / mag[over]
    return g


def _clamp_norm(G: np.ndarray, limit: float, what: str) -> np.ndarray:
    # Singular values in (1, limit] are rounded down to 1; beyond is an error.
    if G.size == 0:
        return G
    U, s, Vh = np.linalg.svd(G, full_matrices=False)
    if s[0] > limit:
        raise DomainError(f"{what}: contraction norm {s[0]:.12g} exceeds 1")
    return (U * np.minimum(s, 1.0)) @ Vh


def block_contraction(A11, A12, A22, tol: Tolerances = DEFAULT_TOL) -> BlockContraction:
    """Contraction linking the corners of a 2x2 block PSD matrix.

    Returns ``Gamma = A11^{-1/2} A12 A22^{-1/2}`` (pseudo-inverse roots) with
    its defect operators. Raises :class:`DomainError` when the block matrix
    is not PSD, detected either by ``||Gamma|| > 1`` or by ``A12`` having
    components outside ``range(A11) x range(A22)``.
    """
    A11 = as_matrix(np.atleast_2d(A11))
    A22 = as_matrix(np.atleast_2d(A22))
    A12 = as_matrix(np.atleast_2d(A12))
    if A12.shape != (A11.shape[0], A22.shape[0]):
        raise DimensionError(
            f"A12 shape {A12.shape} does not match corners {A11.shape}, {A22.shape}"
        )
    A11 = require_psd(A11, tol, "A11")
    A22 = require_psd(A22, tol, "A22")
    S1, S2 = principal_sqrt(A11, tol), principal_sqrt(A22, tol)
    G = pinv_sqrt(A11, tol) @ A12 @ pinv_sqrt(A22, tol)
    scale = max(float(np.linalg.norm(A11)), float(np.linalg.norm(A22)), np.finfo(float).tiny)
    if np.linalg.norm(S1 @ G @ S2 - A12) > tol.recon_tol * scale:
        raise DomainError("block matrix not PSD: A12 leaves the range of the diagonal blocks")
    G = _clamp_norm(G, 1 + tol.psd_eig_tol, "block matrix not PSD")
    return BlockContraction.from_gamma(G, tol)


def row_contraction_decompose(T, tol: Tolerances = DEFAULT_TOL) -> list[BlockContraction]:
    """Peel a row contraction ``[T_1 ... T_k]`` into contractions ``Gamma_i``.

    ``T_1 = Gamma_1`` and ``T_i = D_{Gamma_1*} ... D_{Gamma_{i-1}*} Gamma_i``.
    Each ``Gamma_i`` is the minimal-norm solution of that equation, which is a
    contraction whenever the row is; a vanishing defect chain yields zero.
    """
    blocks = [as_matrix(np.atleast_2d(t)) for t in T]
    if not blocks:
        return []
    p = blocks[0].shape[0]
    if any(b.shape[0] != p for b in blocks):
        raise DimensionError("row blocks must share their number of rows")
    row = np.hstack(blocks)
    if row.size and np.linalg.norm(row, 2) > 1 + tol.psd_eig_tol:
        raise DomainError(f"row is not a contraction (norm {np.linalg.norm(row, 2):.12g})")
    out = []
    chain = np.eye(p, dtype=np.complex128)
    for t in blocks:
        G = np.linalg.pinv(chain, rcond=tol.rank_tol, hermitian=False) @ t
        if np.linalg.norm(chain @ G - t) > tol.recon_tol * max(1.0, float(np.linalg.norm(t))):
            raise DecompositionError("inconsistent defect-chain solve")
        try:
            G = _clamp_norm(G, 1 + np.sqrt(tol.psd_eig_tol), "peeled block")
        except DomainError as exc:
            raise DecompositionError(str(exc)) from None
        bc = BlockContraction.from_gamma(G, tol)
        out.append(bc)
        chain = chain @ bc.defect_adj
    return out


def row_contraction_assemble(gammas) -> list[np.ndarray]:
    """Inverse of :func:`row_contraction_decompose`.

    Accepts :class:`BlockContraction` objects or plain arrays/scalars.
    """
    out = []
    chain = None
    for g in gammas:
        if isinstance(g, BlockContraction):
            bc = g
        else:
            bc = BlockContraction.from_gamma(g)
        if chain is None:
            chain = np.eye(bc.gamma.shape[0], dtype=np.complex128)
        out.append(chain @ bc.gamma)
        chain = chain @ bc.defect_adj
    return out


def _solve_row(row: np.ndarray, L: np.ndarray) -> np.ndarray:
    # Minimal-norm R with R @ L = row, L upper triangular with zero rows.
    R = np.zeros(L.shape[0], dtype=np.complex128)
    piv = np.flatnonzero(np.abs(np.diag(L)) > 0)
    if piv.size:
        Lp = L[np.ix_(piv, piv)]
        # R_p Lp = row_p  <=>  Lp^T R_p^T = row_p^T
        R[piv] = solve_triangular(Lp, row[piv], trans="T", lower=False)
    return R


def _peel_scalar(R: np.ndarray, chain_floor: float) -> np.ndarray:
    g = np.zeros_like(R)
    budget = 1.0
    for i, t in enumerate(R):
        if budget <= chain_floor:
            continue
        gi = t / np.sqrt(budget)
        if abs(gi) > 1:
            gi /= abs(gi)
        g[i] = gi
        budget *= 1.0 - abs(gi) ** 2
    return g


def _assemble_scalar(g: np.ndarray) -> np.ndarray:
    R = np.zeros_like(g)
    chain = 1.0
    for i, gi in enumerate(g):
        R[i] = chain * gi
        chain *= np.sqrt(max(0.0, 1.0 - abs(gi) ** 2))
    return R


def sc_extract(A, tol: Tolerances = DEFAULT_TOL) -> SCParameters:
    """SC parameters of a scalar PSD matrix.

    Contractions are zero whenever ``A[i, i] * A[j, j] = 0`` and whenever the
    defect chain in front of them vanishes (the contraction is then free and
    zero is the canonical choice).

    Raises
    ------
    DomainError
        If ``A`` is not PSD.
    ExtractionError
        If a row-contraction solve leaves a residual above ``recon_tol``.
    """
    H = require_psd(A, tol)
    n = H.shape[0]
    d = np.clip(np.diag(H).real, 0.0, None)
    gam = np.zeros((n, n), dtype=np.complex128)
    if n < 2:
        return SCParameters(d, gam)
    dfloor = tol.psd_eig_tol * float(d.max())
    norm_a = max(float(np.linalg.norm(H)), np.finfo(float).tiny)
    floor = cholesky_floor(H, tol)
    for k in range(n - 2, -1, -1):
        if d[k] <= dfloor:
            continue
        L = _cholesky_upper(H[k + 1:, k + 1:], floor)
        sk = np.sqrt(d[k])
        row = H[k, k + 1:] / sk
        R = _solve_row(row, L)
        if np.linalg.norm(sk * (R @ L - row)) > tol.recon_tol * norm_a:
            raise ExtractionError(f"row contraction solve for row {k + 1} is inconsistent")
        nrm = float(np.linalg.norm(R))
        if nrm > 1 + np.sqrt(tol.psd_eig_tol):
            raise ExtractionError(f"row contraction {k + 1} has norm {nrm:.12g} > 1")
        g = _peel_scalar(R, tol.rank_tol)
        g[d[k + 1:] <= dfloor] = 0
        gam[k, k + 1:] = g
    return SCParameters(d, gam)


def sc_reconstruct(p: SCParameters) -> np.ndarray:
    """The PSD matrix with diagonal ``p.diag`` and contractions ``p.gammas``."""
    n = p.n
    d = p.diag
    A = np.diag(d).astype(np.complex128)
    if n < 2:
        return A
    floor_tol = DEFAULT_TOL
    for k in range(n - 2, -1, -1):
        trail = A[k + 1:, k + 1:]
        L = _cholesky_upper(trail, cholesky_floor(trail, floor_tol))
        R = _assemble_scalar(p.gammas[k, k + 1:])
        row = np.sqrt(d[k]) * (R @ L)
        A[k, k + 1:] = row
        A[k + 1:, k] = row.conj()
    return A


def sc_cholesky(p: SCParameters) -> np.ndarray:
    """Upper-triangular ``F`` with nonnegative diagonal and ``F* F = sc_reconstruct(p)``."""
    return semidefinite_cholesky(sc_reconstruct(p))


def sc_determinant(p: SCParameters) -> float:
    """``prod(diag) * prod_{i<j} (1 - |gamma_ij|^2)``."""
    iu = np.triu_indices(p.n, 1)
    return float(np.prod(p.diag) * np.prod(1.0 - np.abs(p.gammas[iu]) ** 2))


def sc_is_rank_one(p: SCParameters, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Rank-one test read off the SC parameters.

    Let ``i_0 < i_1 < ...`` be the indices with nonzero diagonal. The matrix
    has rank one iff every consecutive pair has ``|gamma_{i_l, i_{l+1}}| = 1``:
    with the zero rows in between, that contraction is the plain correlation
    of the two variables.
    """
    d = p.diag
    if d.size == 0 or not np.any(d > 0):
        raise DomainError("rank-one test needs a nonzero diagonal")
    live = np.flatnonzero(d > tol.psd_eig_tol * d.max())
    for i, j in zip(live[:-1], live[1:]):
        if 1.0 - abs(p.gammas[i, j]) ** 2 > tol.recon_tol:
            return False
    return True
