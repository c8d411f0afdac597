import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import crandn, partial_correlation, random_psd, rel_err
from posparam import (
    DEFAULT_TOL,
    BlockContraction,
    DimensionError,
    DomainError,
    SCParameters,
    block_contraction,
    is_psd,
    numerical_rank,
    principal_sqrt,
    row_contraction_assemble,
    row_contraction_decompose,
    sc_cholesky,
    sc_determinant,
    sc_extract,
    sc_is_rank_one,
    sc_reconstruct,
)
from posparam.errors import DecompositionError

seeds = st.integers(0, 2**32 - 1)


def params(d, entries):
    n = len(d)
    G = np.zeros((n, n), dtype=complex)
    for (i, j), g in entries.items():
        G[i - 1, j - 1] = g
    return SCParameters(np.array(d, float), G)


def random_contraction(rng, p, q, norm):
    G = crandn(rng, p, q)
    return G * (norm / np.linalg.norm(G, 2))


class TestSCParameters:
    def test_gamma_accessor_is_one_based(self):
        p = params([1, 1, 1], {(1, 3): 0.5})
        assert p.gamma(1, 3) == 0.5 and p.gamma(1, 2) == 0
        with pytest.raises(IndexError):
            p.gamma(2, 2)

    def test_outside_disc_rejected(self):
        with pytest.raises(DomainError):
            params([1, 1], {(1, 2): 1.5})

    def test_negative_diag_rejected(self):
        with pytest.raises(DomainError):
            params([1, -1], {})

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            SCParameters(np.ones(3), np.zeros((2, 2)))

    def test_zero_diagonal_convention(self):
        p = params([1, 0, 1], {(1, 2): 0.5, (2, 3): 0.5, (1, 3): 0.3})
        assert p.gamma(1, 2) == 0 and p.gamma(2, 3) == 0 and p.gamma(1, 3) == 0.3

    def test_immutable(self):
        p = params([1, 1], {(1, 2): 0.5})
        with pytest.raises(ValueError):
            p.gammas[0, 1] = 0.1


class TestBlockContraction:
    def test_identity_corners(self):
        bc = block_contraction(np.eye(2), np.zeros((2, 2)), np.eye(2))
        assert np.allclose(bc.gamma, 0)

    @pytest.mark.parametrize("g", [0.3, -0.9, 0.6j, 1.0])
    def test_scalar(self, g):
        assert np.isclose(block_contraction(1.0, g, 1.0).gamma[0, 0], g)

    def test_rank_deficient_corner(self):
        A11, A22, A12 = np.diag([1.0, 0.0]), np.array([[1.0]]), np.array([[0.5], [0.0]])
        bc = block_contraction(A11, A12, A22)
        assert np.allclose(bc.gamma, [[0.5], [0.0]])
        assert np.isclose(np.linalg.norm(bc.gamma, 2), 0.5)
        assert np.allclose(principal_sqrt(A11) @ bc.gamma @ principal_sqrt(A22), A12)
        assert is_psd(np.block([[A11, A12], [A12.conj().T, A22]]))

    def test_not_psd(self):
        with pytest.raises(DomainError):
            block_contraction(1.0, 2.0, 1.0)

    def test_out_of_range(self):
        with pytest.raises(DomainError, match="range"):
            block_contraction(np.diag([1.0, 0.0]), np.array([[0.0], [0.5]]), np.eye(1))

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            block_contraction(np.eye(2), np.zeros((3, 1)), np.eye(1))

    @settings(max_examples=100, deadline=None)
    @given(seeds, st.integers(1, 4), st.integers(1, 4))
    def test_intertwining(self, seed, p, q):
        rng = np.random.default_rng(seed)
        G = random_contraction(rng, p, q, rng.uniform(0, 1))
        bc = BlockContraction.from_gamma(G)
        assert np.linalg.norm(G @ bc.defect - bc.defect_adj @ G) <= DEFAULT_TOL.recon_tol

    @settings(max_examples=50, deadline=None)
    @given(seeds, st.integers(1, 4), st.integers(1, 4), st.floats(0.0, 1.0))
    def test_positivity_inside_ball(self, seed, p, q, norm):
        rng = np.random.default_rng(seed)
        A11, A22 = random_psd(rng, p), random_psd(rng, q)
        G = random_contraction(rng, p, q, norm)
        A12 = principal_sqrt(A11) @ G @ principal_sqrt(A22)
        assert is_psd(np.block([[A11, A12], [A12.conj().T, A22]]))
        assert np.allclose(block_contraction(A11, A12, A22).gamma, G, atol=1e-7)


class TestRowContraction:
    def test_unit_row(self):
        gs = row_contraction_decompose([0.6, 0.8])
        assert np.isclose(gs[0].gamma[0, 0], 0.6) and np.isclose(gs[1].gamma[0, 0], 1.0)

    def test_zero_row(self):
        assert all(np.allclose(g.gamma, 0) for g in row_contraction_decompose([0, 0, 0]))

    def test_saturated_first_entry(self):
        gs = row_contraction_decompose([1.0, 0.0])
        assert np.isclose(gs[0].gamma[0, 0], 1.0) and gs[1].gamma[0, 0] == 0

    def test_not_contraction(self):
        with pytest.raises(DomainError):
            row_contraction_decompose([1.0, 0.5])

    def test_assemble_examples(self):
        assert np.allclose(np.ravel(row_contraction_assemble([0.6, 1.0])), [0.6, 0.8])
        assert np.allclose(np.ravel(row_contraction_assemble([0.3j])), [0.3j])
        assert np.allclose(np.ravel(row_contraction_assemble([0, 0])), [0, 0])

    def test_empty(self):
        assert row_contraction_decompose([]) == [] and row_contraction_assemble([]) == []

    def test_mismatched_rows(self):
        with pytest.raises(DimensionError):
            row_contraction_decompose([np.zeros((2, 1)), np.zeros((3, 1))])

    @settings(max_examples=60, deadline=None)
    @given(seeds, st.integers(1, 3), st.lists(st.integers(1, 3), min_size=1, max_size=4))
    def test_block_round_trip(self, seed, p, widths):
        rng = np.random.default_rng(seed)
        row = random_contraction(rng, p, sum(widths), rng.uniform(0.1, 0.99))
        T = np.split(row, np.cumsum(widths)[:-1], axis=1)
        gs = row_contraction_decompose(T)
        assert all(np.linalg.norm(g.gamma, 2) <= 1 + 1e-12 for g in gs)
        back = row_contraction_assemble(gs)
        assert np.allclose(np.hstack(back), row, atol=1e-8)

    def test_decomposition_error_type(self):
        assert issubclass(DecompositionError, DomainError)


class TestExtract:
    def test_identity(self):
        p = sc_extract(np.eye(4))
        assert np.allclose(p.diag, 1) and np.all(p.gammas == 0)

    def test_all_ones_consecutive_are_one(self):
        # Gamma_13 sits behind a vanished defect chain; the canonical choice is 0
        p = sc_extract(np.ones((3, 3)))
        assert np.isclose(p.gamma(1, 2), 1) and np.isclose(p.gamma(2, 3), 1)
        assert p.gamma(1, 3) == 0
        assert np.allclose(sc_reconstruct(p), np.ones((3, 3)))

    def test_random_gram(self):
        A = random_psd(np.random.default_rng(4), 4)
        assert rel_err(sc_reconstruct(sc_extract(A)), A) <= 1e-8

    def test_partial_correlation_oracle(self):
        rng = np.random.default_rng(8)
        A = random_psd(rng, 6)
        p = sc_extract(A)
        for i in range(6):
            for j in range(i + 1, 6):
                assert abs(p.gammas[i, j] - partial_correlation(A, i, j)) < 1e-10

    def test_rejects_non_psd(self):
        with pytest.raises(DomainError):
            sc_extract([[1, 2], [2, 1]])

    def test_zero_diagonal_entry(self):
        A = np.array([[1.0, 0, 0.5], [0, 0, 0], [0.5, 0, 1.0]])
        p = sc_extract(A)
        assert p.gamma(1, 2) == 0 and p.gamma(2, 3) == 0 and np.isclose(p.gamma(1, 3), 0.5)
        assert np.allclose(sc_reconstruct(p), A)

    def test_one_by_one(self):
        p = sc_extract([[2.0]])
        assert p.n == 1 and sc_determinant(p) == 2.0

    @settings(max_examples=80, deadline=None)
    @given(seeds, st.integers(2, 10), st.integers(1, 10))
    def test_round_trip_and_bound(self, seed, n, r):
        A = random_psd(np.random.default_rng(seed), n, min(r, n))
        p = sc_extract(A)
        assert np.all(np.abs(p.gammas) <= 1)
        assert rel_err(sc_reconstruct(p), A) <= DEFAULT_TOL.recon_tol

    @settings(max_examples=40, deadline=None)
    @given(seeds, st.integers(2, 7))
    def test_parameter_stability(self, seed, n):
        rng = np.random.default_rng(seed)
        G = np.triu(crandn(rng, n, n), 1)
        G = G / np.maximum(np.abs(G), 1) * rng.uniform(0, 0.95, size=(n, n))
        p = SCParameters(rng.uniform(0.5, 2, n), G)
        q = sc_extract(sc_reconstruct(p))
        assert np.allclose(q.gammas, p.gammas, atol=1e-8)
        assert np.allclose(q.diag, p.diag)


class TestReconstruct:
    def test_two_by_two(self):
        g = 0.3 - 0.4j
        assert np.allclose(sc_reconstruct(params([1, 1], {(1, 2): g})), [[1, g], [np.conj(g), 1]])

    def test_all_unit(self):
        p = params([1, 1, 1], {(1, 2): 1, (2, 3): 1, (1, 3): 1})
        assert np.allclose(sc_reconstruct(p), np.ones((3, 3)))

    def test_corner_only(self):
        g = 0.7j
        A = sc_reconstruct(params([1, 1, 1], {(1, 3): g}))
        assert np.allclose(A, [[1, 0, g], [0, 1, 0], [np.conj(g), 0, 1]])
        assert is_psd(A)
        assert np.isclose(sc_extract(A).gamma(1, 3), g)

    @settings(max_examples=60, deadline=None)
    @given(seeds, st.integers(2, 8))
    def test_any_disc_values_give_psd(self, seed, n):
        rng = np.random.default_rng(seed)
        G = np.triu(crandn(rng, n, n), 1)
        G = G / np.abs(np.where(G == 0, 1, G)) * rng.uniform(0, 1, size=(n, n))
        A = sc_reconstruct(SCParameters(rng.uniform(0, 2, n), G))
        assert is_psd(A)


class TestCholeskyDeterminant:
    def test_two_by_two_factor(self):
        g = 0.6
        F = sc_cholesky(params([1, 1], {(1, 2): g}))
        assert np.allclose(F, [[1, g], [0, np.sqrt(1 - g * g)]])

    def test_zero_gammas(self):
        d = [4.0, 1.0, 9.0]
        assert np.allclose(sc_cholesky(params(d, {})), np.diag(np.sqrt(d)))

    def test_all_unit_factor(self):
        F = sc_cholesky(params([1, 1, 1], {(1, 2): 1, (2, 3): 1, (1, 3): 1}))
        assert np.allclose(F, [[1, 1, 1], [0, 0, 0], [0, 0, 0]])

    def test_determinant_examples(self):
        g = 0.5 + 0.5j
        assert np.isclose(sc_determinant(params([1, 1], {(1, 2): g})), 1 - abs(g) ** 2)
        assert sc_determinant(params([1, 1, 1], {(1, 2): 1, (2, 3): 1, (1, 3): 1})) == 0

    def test_random_five(self):
        A = random_psd(np.random.default_rng(12), 5)
        det = np.linalg.det(A).real
        assert abs(sc_determinant(sc_extract(A)) - det) <= 1e-8 * det

    @settings(max_examples=60, deadline=None)
    @given(seeds, st.integers(2, 8))
    def test_determinant_matches_lu(self, seed, n):
        A = random_psd(np.random.default_rng(seed), n)
        det = np.linalg.det(A).real
        assert abs(sc_determinant(sc_extract(A)) - det) <= 1e-8 * det

    @settings(max_examples=60, deadline=None)
    @given(seeds, st.integers(2, 8), st.integers(1, 8))
    def test_factor(self, seed, n, r):
        A = random_psd(np.random.default_rng(seed), n, min(r, n))
        F = sc_cholesky(sc_extract(A))
        assert np.array_equal(F, np.triu(F))
        assert rel_err(F.conj().T @ F, A) <= DEFAULT_TOL.recon_tol


class TestRankOne:
    def test_examples(self):
        assert sc_is_rank_one(params([1, 1], {(1, 2): 1}))
        assert not sc_is_rank_one(params([1, 1], {(1, 2): 0.5}))

    def test_random_rank_one(self):
        rng = np.random.default_rng(1)
        v = crandn(rng, 5)
        A = np.outer(v, v.conj())
        assert sc_is_rank_one(sc_extract(A)) and numerical_rank(A) == 1

    def test_degenerate_chain_counterexample(self):
        # Gamma_13 is free here, but the matrix has rank 2
        p = params([1, 1, 1], {(1, 2): 1, (1, 3): 1})
        assert numerical_rank(sc_reconstruct(p)) == 2
        assert not sc_is_rank_one(p)

    def test_skips_zero_diagonal(self):
        v = np.array([1.0, 0.0, 2.0j, 0.0])
        assert sc_is_rank_one(sc_extract(np.outer(v, v.conj())))

    def test_zero_matrix(self):
        with pytest.raises(DomainError):
            sc_is_rank_one(params([0, 0], {}))

    @settings(max_examples=80, deadline=None)
    @given(seeds, st.integers(2, 8), st.integers(1, 3))
    def test_agrees_with_rank_oracle(self, seed, n, r):
        A = random_psd(np.random.default_rng(seed), n, min(r, n))
        assert sc_is_rank_one(sc_extract(A)) == (np.linalg.matrix_rank(A, tol=1e-8 * np.abs(A).max()) == 1)
