"""Random generators and independent oracles shared by the test modules.

The oracles avoid the package's own factorizations: determinants come from
LU (``np.linalg.det``), ranks from ``np.linalg.matrix_rank`` and contractions
from conditional covariances.
"""

import numpy as np


def crandn(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_psd(rng, n, rank=None):
    rank = n if rank is None else rank
    X = crandn(rng, rank, n)
    return X.conj().T @ X


def random_density(rng, n, rank=None):
    A = random_psd(rng, n, rank)
    return A / np.trace(A).real


def random_pure(rng, n):
    v = crandn(rng, n)
    v /= np.linalg.norm(v)
    return np.outer(v, v.conj())


def sc_corpus(seed=2024, count=500):
    """Sizes 2..10, every fifth matrix rank-deficient."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        n = int(rng.integers(2, 11))
        rank = int(rng.integers(1, n)) if k % 5 == 0 else n
        out.append(random_psd(rng, n, rank))
    return out


def partial_correlation(A, i, j):
    """Correlation of variables i < j given those strictly between them (0-based)."""
    S = list(range(i + 1, j))
    idx = [i, j]
    C = A[np.ix_(idx, idx)]
    if S:
        C = C - A[np.ix_(idx, S)] @ np.linalg.solve(A[np.ix_(S, S)], A[np.ix_(S, idx)])
    return C[0, 1] / np.sqrt(C[0, 0].real * C[1, 1].real)


def rel_err(X, Y):
    return np.linalg.norm(X - Y) / max(np.linalg.norm(Y), 1e-300)


def bell_state():
    v = np.array([1, 0, 0, 1]) / np.sqrt(2)
    return np.outer(v, v)


def max_entangled(d):
    v = np.eye(d).reshape(-1) / np.sqrt(d)
    return np.outer(v, v)


def product_pure(rng, m, n):
    u, w = crandn(rng, m), crandn(rng, n)
    v = np.kron(u, w)
    v /= np.linalg.norm(v)
    return np.outer(v, v.conj())


# 2x2 block-Toeplitz state [[A0, A1], [A1^T, A0]] of full rank; PPT holds
BLOCK_TOEPLITZ_A0 = np.array([[2.0, 0.5], [0.5, 2.0]])
BLOCK_TOEPLITZ_A1 = np.array([[0.3, 0.1], [0.2, 0.4]])


def block_toeplitz_fixture():
    M = np.block([[BLOCK_TOEPLITZ_A0, BLOCK_TOEPLITZ_A1], [BLOCK_TOEPLITZ_A1.T, BLOCK_TOEPLITZ_A0]])
    return M / np.trace(M)


# PD matrix whose near tri-diagonal model needs c_{0,2} != 0
NO_TRIDIAGONAL_MODEL = np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 0.0], [1.0, 0.0, 2.0]])
