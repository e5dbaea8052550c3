import numpy as np
import pytest
from sklearn.base import clone

from stableae import (
    GaussianNoise,
    InvalidInputError,
    IsaConfig,
    IteratedStableAutoencoder,
    PoissonNoise,
    StableAutoencoder,
    gaussian_fixed_point_shrinkage,
    gaussian_isa_closed_form,
    gaussian_sa_closed_form,
    iterated_stable_autoencoder,
    orient,
    psd_leq,
    stable_autoencoder,
)
from stableae.shrinkers import tsvd_k


class TestOrient:
    def test_wide_is_transposed(self):
        X = np.arange(15.0).reshape(3, 5)
        Xo, flipped = orient(X)
        assert flipped and Xo.shape == (5, 3)

    def test_tall_unchanged(self):
        X = np.arange(15.0).reshape(5, 3)
        Xo, flipped = orient(X)
        assert not flipped and np.array_equal(Xo, X)

    def test_square_unchanged(self):
        X = np.eye(4)
        Xo, flipped = orient(X)
        assert not flipped and np.array_equal(Xo, X)


class TestStableAutoencoder:
    def test_matches_gaussian_closed_form(self):
        rng = np.random.default_rng(0)
        for trial in range(10):
            n, p = rng.integers(3, 12, size=2)
            k = int(rng.integers(1, min(n, p) + 1))
            sigma2 = float(rng.uniform(0.1, 2.0))
            delta = float(rng.uniform(0.1, 0.9))
            X = rng.standard_normal((n, p))
            got = stable_autoencoder(X, GaussianNoise(sigma2, delta), k)
            want = gaussian_sa_closed_form(X, sigma2, delta, k)
            rel = np.linalg.norm(got.estimate - want.estimate) / np.linalg.norm(X)
            assert rel < 1e-9, f"trial {trial}: {rel}"

    def test_vanishing_delta_recovers_truncated_svd(self):
        rng = np.random.default_rng(1)
        X = rng.standard_normal((6, 4))
        got = stable_autoencoder(X, GaussianNoise(1.0, 1e-9), 2)
        assert np.linalg.norm(got.estimate - tsvd_k(X, 2)) < 1e-6

    def test_diagnostics(self):
        rng = np.random.default_rng(2)
        X = rng.standard_normal((6, 4))
        res = stable_autoencoder(X, GaussianNoise(0.5, 0.5), 2)
        assert res.iterations == 1
        assert res.final_residual == 0.0
        assert res.effective_rank == 2

    def test_closed_form_shrinks_single_value(self):
        # lam = delta/(1-delta) * n * sigma2 = 1; d = 2 shrinks to 1.6
        X = np.zeros((4, 2))
        X[0, 0] = 2.0
        X[1, 1] = 1.0
        res = gaussian_sa_closed_form(X, sigma2=0.5, delta=1.0 / 3.0, rank=2)
        d = np.linalg.svd(res.estimate, compute_uv=False)
        assert np.allclose(d, [1.6, 0.5], atol=1e-12)


class TestIteratedStableAutoencoder:
    def test_matches_fixed_point_closed_form(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            X = rng.standard_normal((10, 6)) * 2.0
            sigma2 = 0.2
            got = iterated_stable_autoencoder(X, GaussianNoise(sigma2, 0.5))
            want = gaussian_isa_closed_form(X, sigma2)
            err = np.linalg.norm(got.estimate - want.estimate)
            assert err < 1e-6 * max(np.linalg.norm(X), 1.0)
            assert got.effective_rank == want.effective_rank

    def test_weak_signal_collapses_to_zero(self):
        rng = np.random.default_rng(4)
        n, p = 12, 6
        sigma2 = 4.0
        X = rng.standard_normal((n, p)) * 0.1
        assert np.linalg.svd(X, compute_uv=False)[0] ** 2 < 4 * n * sigma2
        res = iterated_stable_autoencoder(X, GaussianNoise(sigma2, 0.5))
        assert np.allclose(res.estimate, 0.0, atol=1e-8)
        assert res.effective_rank == 0

    def test_iterates_are_psd_monotone(self):
        rng = np.random.default_rng(5)
        X = rng.standard_normal((9, 5)) * 1.5
        path = [X]
        res = iterated_stable_autoencoder(
            X, GaussianNoise(0.3, 0.5), callback=path.append
        )
        for prev, cur in zip(path, path[1:]):
            assert psd_leq(cur.T @ cur, prev.T @ prev, 1e-8)
        assert psd_leq(res.estimate.T @ res.estimate, X.T @ X, 1e-8)

    def test_spectral_gap_at_fixed_point(self):
        rng = np.random.default_rng(6)
        X = np.abs(rng.poisson(6.0, size=(10, 5))).astype(float)
        model = PoissonNoise(0.5)
        res = iterated_stable_autoencoder(X, model)
        mu = res.estimate
        penalty = X.sum(axis=0)  # delta = 1/2
        top = np.linalg.svd(X, compute_uv=False)[0]
        _, vecs = np.linalg.eigh(mu.T @ mu)
        for u in vecs.T:
            norm = np.linalg.norm(mu @ u)
            bound = 1.0 / np.linalg.norm(X @ (u / penalty)) ** 2
            assert norm < 1e-7 * top or norm >= bound - 1e-6

    def test_kept_values_never_shrink_below_half(self):
        rng = np.random.default_rng(7)
        X = rng.standard_normal((8, 5)) * 3.0
        res = gaussian_isa_closed_form(X, 0.3)
        d_in = np.linalg.svd(orient(X)[0], compute_uv=False)
        d_out = np.linalg.svd(orient(res.estimate)[0], compute_uv=False)
        kept = d_out > 1e-9
        assert np.all(d_out[kept] >= d_in[kept] / 2.0 - 1e-9)

    def test_boundary_value_shrinks_to_half(self):
        n = 5
        sigma2 = 0.8
        d = np.sqrt(4 * n * sigma2)
        X = np.zeros((n, 3))
        X[0, 0] = d
        psi = gaussian_fixed_point_shrinkage(np.array([d]), n, sigma2)
        assert np.allclose(psi, d / 2.0, atol=1e-12)
        below = gaussian_fixed_point_shrinkage(np.array([d * 0.999]), n, sigma2)
        assert below[0] == 0.0

    def test_transposition_consistency(self):
        rng = np.random.default_rng(8)
        X = rng.standard_normal((7, 4))
        model = GaussianNoise(0.4, 0.5)
        a = iterated_stable_autoencoder(X, model)
        b = iterated_stable_autoencoder(X.T, model)
        assert np.array_equal(a.estimate, b.estimate.T)
        assert a.effective_rank == b.effective_rank

    def test_non_convergence_is_flagged(self):
        rng = np.random.default_rng(9)
        X = rng.standard_normal((8, 5)) * 2.0
        cfg = IsaConfig(max_iterations=1, convergence_tolerance=1e-12)
        res = iterated_stable_autoencoder(X, GaussianNoise(0.3, 0.5), cfg)
        assert res.iterations == 1
        assert res.final_residual > 1e-12

    def test_config_validation(self):
        with pytest.raises(InvalidInputError):
            IsaConfig(max_iterations=0)
        with pytest.raises(InvalidInputError):
            IsaConfig(convergence_tolerance=0.0)


class TestEstimatorClasses:
    def test_fit_matches_function(self):
        rng = np.random.default_rng(10)
        X = rng.standard_normal((8, 5))
        est = StableAutoencoder(rank=2, noise="gaussian", delta=0.5, sigma2=0.4).fit(X)
        res = stable_autoencoder(X, GaussianNoise(0.4, 0.5), 2)
        assert np.allclose(est.estimate_, res.estimate)
        assert est.effective_rank_ == res.effective_rank

    def test_transform_reproduces_estimate(self):
        rng = np.random.default_rng(11)
        for shape in ((8, 5), (5, 8)):
            X = rng.standard_normal(shape)
            est = IteratedStableAutoencoder(noise="gaussian", sigma2=0.3).fit(X)
            assert np.allclose(est.transform(X), est.estimate_, atol=1e-12)

    def test_transform_validates_shape(self):
        rng = np.random.default_rng(12)
        est = StableAutoencoder(rank=1, sigma2=0.5).fit(rng.standard_normal((6, 4)))
        with pytest.raises(InvalidInputError):
            est.transform(rng.standard_normal((6, 5)))

    def test_unfitted_raises(self):
        with pytest.raises(InvalidInputError):
            StableAutoencoder().transform(np.eye(3))

    def test_sklearn_protocol(self):
        est = IteratedStableAutoencoder(noise="poisson", delta=0.3)
        cloned = clone(est)
        assert cloned.get_params()["delta"] == 0.3
        est.set_params(delta=0.6)
        assert est.delta == 0.6

    def test_accepts_model_instance(self):
        rng = np.random.default_rng(13)
        X = rng.poisson(5.0, size=(8, 4)).astype(float)
        est = IteratedStableAutoencoder(noise=PoissonNoise(0.5)).fit(X)
        res = iterated_stable_autoencoder(X, PoissonNoise(0.5))
        assert np.allclose(est.estimate_, res.estimate)
        assert est.converged_

    def test_gaussian_sigma_estimated_when_missing(self):
        rng = np.random.default_rng(14)
        X = rng.standard_normal((30, 20))
        est = StableAutoencoder(rank=2, noise="gaussian").fit(X)
        assert est.estimate_.shape == X.shape
