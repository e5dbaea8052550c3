"""Noise-stable autoencoder estimators for low-rank matrix denoising.

Two estimators are provided, each as a plain function returning an
:class:`EstimateResult` and as a scikit-learn style transformer:

* the stable autoencoder (fixed target rank): the best rank-k encoder of the
  data under bootstrap perturbations, solved in closed form through a
  column-weighted ridge problem;
* the iterated stable autoencoder: the fixed point of re-solving that
  problem against the current estimate, which selects the rank on its own
  through a spectral gap.

Both first transpose the input so that rows outnumber columns (the penalty
is column-indexed), and transpose the estimate back before returning.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.linalg
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import IllPosedPenaltyError, InvalidInputError
from .linalg import shrink_and_rebuild, solve_reduced_rank, svd
from .metrics import numerical_rank
from .noise import (
    GaussianNoise,
    NoiseModel,
    PoissonNoise,
    make_noise_model,
    penalty_diagonal,
    variance_matrix,
)
from .validation import as_matrix, check_delta, check_positive, check_rank

DEFAULT_MAX_ITERATIONS = 500
DEFAULT_CONVERGENCE_TOLERANCE = 1e-9
DEFAULT_RANK_TOLERANCE = 1e-7


@dataclass(frozen=True)
class IsaConfig:
    """Iteration controls for the iterated stable autoencoder."""

    max_iterations: int = DEFAULT_MAX_ITERATIONS
    convergence_tolerance: float = DEFAULT_CONVERGENCE_TOLERANCE
    rank_tolerance: float = DEFAULT_RANK_TOLERANCE

    def __post_init__(self):
        if self.max_iterations < 1:
            raise InvalidInputError("max_iterations must be >= 1")
        check_positive(self.convergence_tolerance, "convergence_tolerance")
        check_positive(self.rank_tolerance, "rank_tolerance")


@dataclass(frozen=True)
class EstimateResult:
    """A denoised matrix plus diagnostics.

    ``final_residual`` is the last relative Frobenius change between
    iterates; a value above the convergence tolerance flags that the
    iteration stopped on the iteration cap rather than on convergence.
    """

    estimate: np.ndarray
    effective_rank: int
    iterations: int
    final_residual: float


def orient(X) -> tuple[np.ndarray, bool]:
    """Transpose ``X`` when it has more columns than rows.

    Returns ``(X or X.T, transposed)``; square inputs are left unchanged.
    """
    A = as_matrix(X)
    if A.shape[1] > A.shape[0]:
        return A.T, True
    return A, False


def _restore(mu: np.ndarray, transposed: bool) -> np.ndarray:
    return mu.T if transposed else mu


def _fit_stable_autoencoder(X, model: NoiseModel, rank: int):
    Xo, transposed = orient(X)
    k = check_rank(rank, *Xo.shape)
    penalty = penalty_diagonal(variance_matrix(model, Xo))
    encoder = solve_reduced_rank(Xo, penalty, k)
    mu = Xo @ encoder
    result = EstimateResult(
        estimate=_restore(mu, transposed),
        effective_rank=numerical_rank(mu, DEFAULT_RANK_TOLERANCE),
        iterations=1,
        final_residual=0.0,
    )
    return result, encoder, transposed


def stable_autoencoder(X, model: NoiseModel, rank: int) -> EstimateResult:
    """Denoise ``X`` with the rank-``rank`` stable autoencoder.

    The encoder is the rank-constrained minimizer of the expected
    reconstruction error under bootstrap noise, which reduces to

        ||X - XB||^2 + ||diag(s)^{1/2} B||^2,   s = column sums of the
                                                bootstrap cell variances.

    Parameters
    ----------
    X : array_like, shape (n, p)
    model : GaussianNoise or PoissonNoise
    rank : int
        Target rank, between 1 and min(n, p).
    """
    result, _, _ = _fit_stable_autoencoder(X, model, rank)
    return result


def gaussian_sa_closed_form(X, sigma2: float, delta: float, rank: int) -> EstimateResult:
    """Closed-form stable autoencoder for homoskedastic Gaussian noise.

    Keeps the singular vectors of ``X`` and shrinks each retained singular
    value d to ``d / (1 + lam / d^2)`` with
    ``lam = delta/(1-delta) * n * sigma2`` (n = rows after orientation);
    values beyond ``rank`` are dropped.
    """
    check_positive(sigma2, "sigma2")
    check_delta(delta)
    Xo, transposed = orient(X)
    k = check_rank(rank, *Xo.shape)
    lam = delta / (1.0 - delta) * Xo.shape[0] * sigma2
    factors = svd(Xo)
    d = factors.d
    psi = np.where(d > 0, d**3 / (d**2 + lam), 0.0)
    psi[k:] = 0.0
    mu = shrink_and_rebuild(factors, psi)
    return EstimateResult(
        estimate=_restore(mu, transposed),
        effective_rank=numerical_rank(mu, DEFAULT_RANK_TOLERANCE),
        iterations=1,
        final_residual=0.0,
    )


def _spd_solve(M: np.ndarray, penalty: np.ndarray) -> np.ndarray:
    """Solve ``(M + diag(penalty)) B = M`` for symmetric PSD ``M``."""
    G = M.copy()
    G[np.diag_indices_from(G)] += penalty
    try:
        return scipy.linalg.solve(G, M, assume_a="pos")
    except np.linalg.LinAlgError as exc:
        raise IllPosedPenaltyError(
            "iteration matrix is numerically singular; the bootstrap penalty "
            "must be strictly positive (zero data columns under Poisson "
            "noise produce a zero penalty entry)"
        ) from exc


def iterate_encoder(
    X: np.ndarray,
    penalty: np.ndarray,
    config: IsaConfig,
    callback: Optional[Callable[[np.ndarray], None]] = None,
):
    """Run the fixed-point iteration on an already-oriented matrix.

    Returns ``(mu, encoder, iterations, residual)``.  The penalty is held
    fixed throughout; only the estimate (and with it the encoder) moves.
    """
    x_norm = max(float(np.linalg.norm(X)), 1.0)
    mu = X
    encoder = np.eye(X.shape[1])
    residual = np.inf
    iterations = 0
    for _ in range(config.max_iterations):
        encoder = _spd_solve(mu.T @ mu, penalty)
        mu_next = X @ encoder
        residual = float(np.linalg.norm(mu_next - mu)) / x_norm
        mu = mu_next
        iterations += 1
        if callback is not None:
            callback(mu)
        if residual < config.convergence_tolerance:
            break
    return mu, encoder, iterations, residual


def count_rank(matrix: np.ndarray, reference_top: float, rel_tol: float) -> int:
    """Singular values of ``matrix`` above ``rel_tol`` times ``reference_top``."""
    if reference_top <= 0:
        return 0
    sv = np.linalg.svd(matrix, compute_uv=False)
    return int(np.sum(sv > rel_tol * reference_top))


def _fit_iterated(X, model: NoiseModel, config: IsaConfig,
                  callback: Optional[Callable[[np.ndarray], None]] = None):
    Xo, transposed = orient(X)
    penalty = penalty_diagonal(variance_matrix(model, Xo))
    mu, encoder, iterations, residual = iterate_encoder(Xo, penalty, config, callback)
    top = float(np.linalg.svd(Xo, compute_uv=False)[0])
    result = EstimateResult(
        estimate=_restore(mu, transposed),
        effective_rank=count_rank(mu, top, config.rank_tolerance),
        iterations=iterations,
        final_residual=residual,
    )
    return result, encoder, transposed


def iterated_stable_autoencoder(
    X,
    model: NoiseModel,
    config: IsaConfig | None = None,
    callback: Optional[Callable[[np.ndarray], None]] = None,
) -> EstimateResult:
    """Denoise ``X`` by iterating the stable autoencoder to its fixed point.

    Starting from the data itself, alternates

        B  <-  (M'M + diag(s))^{-1} M'M      (M = current estimate)
        M  <-  X B

    with the penalty ``s`` computed once from ``X`` and never updated.  The
    iteration is monotone in the positive semi-definite ordering of ``M'M``
    and converges to a low-rank fixed point: small but nonzero singular
    values cannot survive, so the effective rank is read off the spectrum.

    Non-convergence within ``config.max_iterations`` is not an error; it is
    flagged by ``final_residual`` exceeding the tolerance.

    ``callback``, if given, receives each new iterate (oriented so rows >=
    columns), which is useful for monitoring or testing the iteration path.
    """
    cfg = config or IsaConfig()
    result, _, _ = _fit_iterated(X, model, cfg, callback)
    return result


def gaussian_fixed_point_shrinkage(d, n_rows: int, sigma2: float) -> np.ndarray:
    """Fixed-point shrinkage values for isotropic noise at delta = 1/2.

    ``psi(d) = (d + sqrt(d^2 - 4 n sigma2)) / 2`` when
    ``d^2 >= 4 n sigma2``, else 0.  A retained value is never shrunk below
    ``d / 2``.
    """
    d = np.asarray(d, dtype=float)
    threshold = 4.0 * n_rows * sigma2
    gap = d**2 - threshold
    return np.where(gap >= 0, 0.5 * (d + np.sqrt(np.maximum(gap, 0.0))), 0.0)


def gaussian_isa_closed_form(X, sigma2: float) -> EstimateResult:
    """Closed form of the iterated estimator for Gaussian noise, delta = 1/2."""
    check_positive(sigma2, "sigma2")
    Xo, transposed = orient(X)
    factors = svd(Xo)
    psi = gaussian_fixed_point_shrinkage(factors.d, Xo.shape[0], sigma2)
    mu = shrink_and_rebuild(factors, psi)
    top = factors.d[0] if factors.d.size else 0.0
    rank = int(np.sum(psi > DEFAULT_RANK_TOLERANCE * top)) if top > 0 else 0
    return EstimateResult(
        estimate=_restore(mu, transposed),
        effective_rank=rank,
        iterations=1,
        final_residual=0.0,
    )


class _NoiseModelMixin:
    """Shared noise-model construction for the estimator classes."""

    def _resolve_model(self, X: np.ndarray) -> NoiseModel:
        noise = self.noise
        if isinstance(noise, (GaussianNoise, PoissonNoise)):
            return noise
        if noise == "gaussian" and self.sigma2 is None:
            # Fall back to the Marchenko-Pastur median estimate of the scale.
            from .shrinkers import estimate_sigma_mp

            return GaussianNoise(sigma2=estimate_sigma_mp(X) ** 2, delta=self.delta)
        return make_noise_model(noise, delta=self.delta, sigma2=self.sigma2)

    def _apply_encoder(self, X) -> np.ndarray:
        A = as_matrix(X)
        if self.transposed_:
            if A.shape[0] != self.encoder_.shape[0]:
                raise InvalidInputError(
                    f"X has {A.shape[0]} rows but the encoder was fit on "
                    f"{self.encoder_.shape[0]}"
                )
            return self.encoder_.T @ A
        if A.shape[1] != self.encoder_.shape[0]:
            raise InvalidInputError(
                f"X has {A.shape[1]} columns but the encoder was fit on "
                f"{self.encoder_.shape[0]}"
            )
        return A @ self.encoder_


class StableAutoencoder(_NoiseModelMixin, TransformerMixin, BaseEstimator):
    """Scikit-learn interface to the fixed-rank stable autoencoder.

    Parameters
    ----------
    rank : int, default 2
        Target rank of the denoised matrix.
    noise : {"gaussian", "poisson"} or a noise model instance, default "gaussian"
        Bootstrap noise model. When a model instance is passed, ``delta``
        and ``sigma2`` are ignored.
    delta : float, default 0.5
        Bootstrap deletion fraction; larger means stronger regularization.
    sigma2 : float, optional
        Gaussian noise variance. When omitted it is estimated from the
        median singular value against the Marchenko-Pastur median.

    Attributes
    ----------
    estimate_ : ndarray
        Denoised version of the training matrix.
    encoder_ : ndarray
        Learned encoder ``B``; ``transform`` applies it to new data with
        the same feature dimension.
    effective_rank_ : int
    n_iter_ : int
    final_residual_ : float
    """

    def __init__(self, rank: int = 2, noise="gaussian", delta: float = 0.5,
                 sigma2: float | None = None):
        self.rank = rank
        self.noise = noise
        self.delta = delta
        self.sigma2 = sigma2

    def fit(self, X, y=None):
        A = as_matrix(X)
        model = self._resolve_model(A)
        result, encoder, transposed = _fit_stable_autoencoder(A, model, self.rank)
        self.estimate_ = result.estimate
        self.encoder_ = encoder
        self.transposed_ = transposed
        self.effective_rank_ = result.effective_rank
        self.n_iter_ = result.iterations
        self.final_residual_ = result.final_residual
        self.n_features_in_ = A.shape[1]
        return self

    def transform(self, X) -> np.ndarray:
        if not hasattr(self, "encoder_"):
            raise InvalidInputError("this estimator is not fitted yet; call fit first")
        return self._apply_encoder(X)


class IteratedStableAutoencoder(_NoiseModelMixin, TransformerMixin, BaseEstimator):
    """Scikit-learn interface to the iterated (rank-selecting) estimator.

    Only the regularization strength ``delta`` needs to be chosen; the rank
    of the estimate comes out of the fixed point. See
    :func:`iterated_stable_autoencoder` for the iteration itself.
    """

    def __init__(self, noise="gaussian", delta: float = 0.5,
                 sigma2: float | None = None,
                 max_iterations: int = DEFAULT_MAX_ITERATIONS,
                 convergence_tolerance: float = DEFAULT_CONVERGENCE_TOLERANCE,
                 rank_tolerance: float = DEFAULT_RANK_TOLERANCE):
        self.noise = noise
        self.delta = delta
        self.sigma2 = sigma2
        self.max_iterations = max_iterations
        self.convergence_tolerance = convergence_tolerance
        self.rank_tolerance = rank_tolerance

    def fit(self, X, y=None):
        A = as_matrix(X)
        model = self._resolve_model(A)
        cfg = IsaConfig(
            max_iterations=self.max_iterations,
            convergence_tolerance=self.convergence_tolerance,
            rank_tolerance=self.rank_tolerance,
        )
        result, encoder, transposed = _fit_iterated(A, model, cfg)
        self.estimate_ = result.estimate
        self.encoder_ = encoder
        self.transposed_ = transposed
        self.effective_rank_ = result.effective_rank
        self.n_iter_ = result.iterations
        self.final_residual_ = result.final_residual
        self.converged_ = result.final_residual < self.convergence_tolerance
        self.n_features_in_ = A.shape[1]
        return self

    def transform(self, X) -> np.ndarray:
        if not hasattr(self, "encoder_"):
            raise InvalidInputError("this estimator is not fitted yet; call fit first")
        return self._apply_encoder(X)
