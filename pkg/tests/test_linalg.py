import numpy as np
import pytest

from stableae import (
    IllPosedPenaltyError,
    InvalidInputError,
    psd_leq,
    reduced_rank_objective,
    shrink_and_rebuild,
    solve_reduced_rank,
    svd,
)
from stableae.shrinkers import tsvd_k

from oracles import brute_force_rank1


class TestSvd:
    def test_identity(self):
        f = svd(np.eye(2))
        assert np.allclose(f.d, [1.0, 1.0])

    def test_diagonal_with_zero(self):
        f = svd(np.diag([3.0, 0.0]))
        assert np.allclose(f.d, [3.0, 0.0])
        # axis-aligned up to sign
        assert np.allclose(np.abs(f.U), np.eye(2), atol=1e-12)
        assert np.allclose(np.abs(f.V), np.eye(2), atol=1e-12)

    def test_reconstruction(self):
        rng = np.random.default_rng(5)
        X = rng.standard_normal((5, 3))
        f = svd(X)
        assert np.linalg.norm((f.U * f.d) @ f.V.T - X) < 1e-10

    @pytest.mark.parametrize("shape", [(4, 4), (7, 3), (3, 7), (1, 5)])
    def test_invariants(self, shape):
        rng = np.random.default_rng(hash(shape) % 2**32)
        X = rng.standard_normal(shape)
        f = svd(X)
        r = min(shape)
        assert f.U.shape == (shape[0], r) and f.V.shape == (shape[1], r)
        assert np.allclose(f.U.T @ f.U, np.eye(r), atol=1e-10)
        assert np.allclose(f.V.T @ f.V, np.eye(r), atol=1e-10)
        assert np.all(np.diff(f.d) <= 1e-15)
        rel = np.linalg.norm((f.U * f.d) @ f.V.T - X) / max(np.linalg.norm(X), 1.0)
        assert rel < 1e-8

    def test_sign_convention_deterministic(self):
        rng = np.random.default_rng(11)
        X = rng.standard_normal((6, 4))
        f = svd(X)
        for l in range(f.V.shape[1]):
            col = f.V[:, l]
            first = col[np.nonzero(col)[0][0]]
            assert first > 0

    def test_rejects_non_finite(self):
        with pytest.raises(InvalidInputError):
            svd(np.array([[1.0, np.nan], [0.0, 1.0]]))


class TestShrinkAndRebuild:
    def test_identity_shrink(self):
        rng = np.random.default_rng(0)
        X = rng.standard_normal((4, 3))
        f = svd(X)
        assert np.allclose(shrink_and_rebuild(f, f.d), X, atol=1e-12)

    def test_rank_one_truncation(self):
        rng = np.random.default_rng(1)
        X = rng.standard_normal((5, 4))
        f = svd(X)
        psi = np.zeros_like(f.d)
        psi[0] = f.d[0]
        assert np.allclose(shrink_and_rebuild(f, psi), tsvd_k(X, 1), atol=1e-12)

    def test_ridge_shrinker_on_diagonal(self):
        # d / (1 + lam/d^2) with lam = 1 on diag(2, 1): (1.6, 0.5)
        f = svd(np.diag([2.0, 1.0]))
        psi = f.d / (1.0 + 1.0 / f.d**2)
        out = shrink_and_rebuild(f, psi)
        assert np.allclose(np.sort(np.diag(out))[::-1], [1.6, 0.5], atol=1e-12)

    def test_length_mismatch(self):
        f = svd(np.eye(3))
        with pytest.raises(InvalidInputError):
            shrink_and_rebuild(f, np.ones(2))

    def test_negative_values_rejected(self):
        f = svd(np.eye(2))
        with pytest.raises(InvalidInputError):
            shrink_and_rebuild(f, np.array([1.0, -0.5]))


class TestSolveReducedRank:
    def test_zero_penalty_recovers_truncated_svd(self):
        rng = np.random.default_rng(2)
        X = rng.standard_normal((6, 4))
        for k in (1, 2, 4):
            B = solve_reduced_rank(X, np.zeros(4), k)
            assert np.allclose(X @ B, tsvd_k(X, k), atol=1e-9)

    def test_isotropic_penalty_matches_ridge_shrinker(self):
        rng = np.random.default_rng(3)
        X = rng.standard_normal((4, 3))
        lam = 1.0
        B = solve_reduced_rank(X, np.full(3, lam), 3)
        f = svd(X)
        expected = shrink_and_rebuild(f, f.d / (1.0 + lam / f.d**2))
        assert np.linalg.norm(X @ B - expected) < 1e-9

    def test_rank1_objective_against_brute_force(self):
        rng = np.random.default_rng(4)
        X = rng.standard_normal((3, 2))
        penalty = rng.uniform(0.2, 2.0, size=2)
        B = solve_reduced_rank(X, penalty, 1)
        ours = reduced_rank_objective(X, penalty, B)
        oracle = brute_force_rank1(X, penalty)
        assert ours <= oracle + 1e-6

    def test_full_rank_equals_unconstrained(self):
        rng = np.random.default_rng(6)
        X = rng.standard_normal((5, 3))
        penalty = rng.uniform(0.5, 1.5, size=3)
        B = solve_reduced_rank(X, penalty, 3)
        G = X.T @ X + np.diag(penalty)
        B_unconstrained = np.linalg.solve(G, X.T @ X)
        assert np.linalg.norm(B - B_unconstrained) < 1e-9

    def test_penalty_monotonicity(self):
        rng = np.random.default_rng(7)
        X = rng.standard_normal((6, 4))
        penalty = rng.uniform(0.1, 1.0, size=4)
        for k in (1, 2, 3):
            fits = [
                np.linalg.norm(X @ solve_reduced_rank(X, c * penalty, k))
                for c in (1.0, 2.0, 5.0, 20.0)
            ]
            assert np.all(np.diff(fits) <= 1e-10)

    def test_rank_out_of_range(self):
        X = np.eye(3)
        with pytest.raises(InvalidInputError):
            solve_reduced_rank(X, np.zeros(3), 0)
        with pytest.raises(InvalidInputError):
            solve_reduced_rank(X, np.zeros(3), 4)

    def test_singular_gram_rejected(self):
        # rank-deficient X with zero penalty cannot be inverted
        X = np.ones((3, 2))
        with pytest.raises(IllPosedPenaltyError):
            solve_reduced_rank(X, np.zeros(2), 1)

    def test_penalty_validation(self):
        X = np.eye(3)
        with pytest.raises(InvalidInputError):
            solve_reduced_rank(X, np.array([1.0, -1.0, 0.0]), 1)
        with pytest.raises(InvalidInputError):
            solve_reduced_rank(X, np.zeros(2), 1)


class TestPsdLeq:
    def test_equal_matrices(self):
        A = np.array([[2.0, 0.3], [0.3, 1.0]])
        assert psd_leq(A, A, 1e-10)

    def test_zero_vs_identity(self):
        assert psd_leq(np.zeros((3, 3)), np.eye(3), 1e-10)
        assert not psd_leq(np.eye(3), np.zeros((3, 3)), 1e-10)

    def test_asymmetric_rejected(self):
        A = np.array([[1.0, 1.0], [0.0, 1.0]])
        with pytest.raises(InvalidInputError):
            psd_leq(A, np.eye(2), 1e-8)

    def test_shape_mismatch(self):
        with pytest.raises(InvalidInputError):
            psd_leq(np.eye(2), np.eye(3), 1e-8)
