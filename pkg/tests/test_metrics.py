import numpy as np
import pytest

from stableae import InvalidInputError, numerical_rank, relative_mse, rv_coefficient


def random_orthogonal(n, rng):
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return q


class TestRelativeMse:
    def test_perfect_estimate(self):
        rng = np.random.default_rng(0)
        mu = rng.standard_normal((4, 3))
        assert relative_mse(mu, mu) == 0.0

    def test_zero_estimate(self):
        rng = np.random.default_rng(1)
        mu = rng.standard_normal((4, 3))
        assert np.isclose(relative_mse(np.zeros_like(mu), mu), 1.0)

    def test_doubled_estimate(self):
        rng = np.random.default_rng(2)
        mu = rng.standard_normal((4, 3))
        assert np.isclose(relative_mse(2.0 * mu, mu), 1.0)

    def test_rotation_invariant(self):
        rng = np.random.default_rng(3)
        mu = rng.standard_normal((5, 4))
        est = mu + 0.1 * rng.standard_normal((5, 4))
        Q = random_orthogonal(5, rng)
        W = random_orthogonal(4, rng)
        assert np.isclose(relative_mse(est, mu),
                          relative_mse(Q @ est @ W.T, Q @ mu @ W.T), rtol=1e-12)

    def test_zero_truth_rejected(self):
        with pytest.raises(InvalidInputError):
            relative_mse(np.ones((2, 2)), np.zeros((2, 2)))

    def test_shape_mismatch(self):
        with pytest.raises(InvalidInputError):
            relative_mse(np.ones((2, 2)), np.ones((2, 3)))


class TestRvCoefficient:
    def test_self_similarity(self):
        rng = np.random.default_rng(4)
        U = rng.standard_normal((6, 2))
        assert np.isclose(rv_coefficient(U, U), 1.0)

    def test_orthogonal_spans(self):
        U = np.zeros((4, 1)); U[0, 0] = 1.0
        W = np.zeros((4, 1)); W[1, 0] = 1.0
        assert np.isclose(rv_coefficient(U, W), 0.0)

    def test_orthogonal_right_multiplication_invariance(self):
        rng = np.random.default_rng(5)
        U = rng.standard_normal((7, 3))
        W = rng.standard_normal((7, 3))
        Q = random_orthogonal(3, rng)
        assert np.isclose(rv_coefficient(U @ Q, W), rv_coefficient(U, W),
                          rtol=1e-10)
        assert np.isclose(rv_coefficient(U, W @ Q), rv_coefficient(U, W),
                          rtol=1e-10)

    def test_bounded_on_random_inputs(self):
        rng = np.random.default_rng(6)
        for _ in range(25):
            U = rng.standard_normal((8, rng.integers(1, 4)))
            W = rng.standard_normal((8, rng.integers(1, 4)))
            value = rv_coefficient(U, W)
            assert 0.0 <= value <= 1.0 + 1e-12

    def test_zero_matrix_rejected(self):
        with pytest.raises(InvalidInputError):
            rv_coefficient(np.zeros((3, 2)), np.ones((3, 2)))

    def test_row_count_mismatch(self):
        with pytest.raises(InvalidInputError):
            rv_coefficient(np.ones((3, 2)), np.ones((4, 2)))


class TestNumericalRank:
    def test_identity(self):
        assert numerical_rank(np.eye(3)) == 3

    def test_tiny_value_below_tolerance(self):
        assert numerical_rank(np.diag([1.0, 1e-12]), 1e-7) == 1

    def test_zero_matrix(self):
        assert numerical_rank(np.zeros((3, 3))) == 0

    def test_tolerance_validation(self):
        with pytest.raises(InvalidInputError):
            numerical_rank(np.eye(2), 0.0)
