"""Classical singular-value shrinkage baselines and noise-scale estimators.

All shrinkers keep the singular vectors of the input and act on its
singular values only, so they are equivariant to simultaneous orthogonal
rotation of rows and columns.  Aspect-ratio formulas use
``beta = min(n, p) / max(n, p)``; no explicit transposition is needed
because singular values are transpose-invariant.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
import scipy.integrate
import scipy.optimize

from .errors import InvalidInputError
from .linalg import shrink_and_rebuild, svd
from .validation import as_matrix, check_positive, check_rank

# Tie handling for the SURE divergence: singular values closer than
# TIE_TOLERANCE are separated by TIE_GAP * d_1 before evaluating the
# pairwise terms (a documented regularization; thresholding itself always
# uses the unperturbed values).
TIE_TOLERANCE = 1e-10
TIE_GAP = 1e-9


def _aspect(X: np.ndarray) -> tuple[int, int, float]:
    n = max(X.shape)
    p = min(X.shape)
    return n, p, p / n


def tsvd_k(X, rank: int) -> np.ndarray:
    """Best rank-``rank`` approximation (truncated SVD)."""
    A = as_matrix(X)
    k = check_rank(rank, *A.shape)
    factors = svd(A)
    psi = factors.d.copy()
    psi[k:] = 0.0
    return shrink_and_rebuild(factors, psi)


def hard_threshold_constant(beta: float) -> float:
    """Optimal hard-threshold multiplier for known noise scale.

    ``lambda*(beta) = sqrt(2(beta+1) + 8 beta / ((beta+1) +
    sqrt(beta^2 + 14 beta + 1)))`` for aspect ratio ``beta <= 1``.
    """
    if not 0 < beta <= 1:
        raise InvalidInputError(f"beta must lie in (0, 1], got {beta}")
    return np.sqrt(
        2.0 * (beta + 1.0)
        + 8.0 * beta / ((beta + 1.0) + np.sqrt(beta**2 + 14.0 * beta + 1.0))
    )


def tsvd_tau(X, sigma: float) -> np.ndarray:
    """Adaptively truncated SVD: hard-threshold at the asymptotically
    optimal level ``lambda*(beta) * sqrt(n) * sigma``."""
    check_positive(sigma, "sigma")
    A = as_matrix(X)
    n, _, beta = _aspect(A)
    tau = hard_threshold_constant(beta) * np.sqrt(n) * sigma
    factors = svd(A)
    psi = np.where(factors.d > tau, factors.d, 0.0)
    return shrink_and_rebuild(factors, psi)


def asymp_shrink(X, sigma: float) -> np.ndarray:
    """Asymptotically optimal shrinkage for Frobenius loss.

    ``psi(d) = sqrt((d^2 - (1+beta) n sigma^2)^2 - 4 beta n^2 sigma^4) / d``
    above the bulk edge ``d^2 >= (1 + sqrt(beta))^2 n sigma^2``, else 0.
    """
    check_positive(sigma, "sigma")
    A = as_matrix(X)
    n, _, beta = _aspect(A)
    a = n * sigma**2
    edge2 = (1.0 + np.sqrt(beta)) ** 2 * a
    factors = svd(A)
    d = factors.d
    radicand = (d**2 - (1.0 + beta) * a) ** 2 - 4.0 * beta * a**2
    psi = np.where(d**2 >= edge2, np.sqrt(np.maximum(radicand, 0.0)) / np.maximum(d, 1e-300), 0.0)
    return shrink_and_rebuild(factors, psi)


def ln_shrink(X, rank: int, sigma: float, scale: str = "sigma2") -> np.ndarray:
    """Low-noise-asymptotics shrinkage of the top ``rank`` singular values.

    ``psi(d) = d * (1 - s / d^2)`` for the retained values, clamped at 0,
    where ``s`` is ``sigma^2`` (default) or ``n * sigma^2`` when
    ``scale="n_sigma2"``.  The two readings are both exposed because the
    natural normalization is ambiguous; the default applies the formula
    as printed.
    """
    if sigma < 0:
        raise InvalidInputError("sigma must be nonnegative")
    if scale not in ("sigma2", "n_sigma2"):
        raise InvalidInputError(f"scale must be sigma2 or n_sigma2, got {scale!r}")
    A = as_matrix(X)
    k = check_rank(rank, *A.shape)
    n, _, _ = _aspect(A)
    s = sigma**2 * (n if scale == "n_sigma2" else 1.0)
    factors = svd(A)
    d = factors.d
    psi = np.where(d > 0, np.maximum(d - s / np.maximum(d, 1e-300), 0.0), 0.0)
    psi[k:] = 0.0
    return shrink_and_rebuild(factors, psi)


def _separate_ties(d: np.ndarray) -> np.ndarray:
    """Spread positive singular values that coincide within TIE_TOLERANCE."""
    out = d.copy()
    if out.size == 0 or out[0] <= 0:
        return out
    gap = TIE_GAP * out[0]
    for i in range(1, out.size):
        if out[i] > 0 and out[i - 1] - out[i] < TIE_TOLERANCE:
            out[i] = max(out[i - 1] - gap, 0.0)
    return out


def _soft_threshold_divergence(d_sep: np.ndarray, n: int, p: int, tau: float) -> float:
    """Divergence of the singular-value soft-thresholding map at ``tau``."""
    active = d_sep > tau
    if not np.any(active):
        return 0.0
    da = d_sep[active]
    term1 = float(np.sum(active))
    term2 = abs(n - p) * float(np.sum(1.0 - tau / da))
    numer = da * (da - tau)
    diff2 = da[:, None] ** 2 - d_sep[None, :] ** 2
    # Exclude self-pairs: positions where the separated values coincide.
    mask = np.abs(diff2) > 0
    ratio = np.where(mask, numer[:, None] / np.where(mask, diff2, 1.0), 0.0)
    term3 = 2.0 * float(np.sum(ratio))
    return term1 + term2 + term3


def svst_sure(X, sigma: float) -> tuple[np.ndarray, float]:
    """Singular-value soft thresholding with the threshold chosen by SURE.

    The unbiased risk estimate

        SURE(tau) = -n p sigma^2 + sum_i min(d_i, tau)^2
                    + 2 sigma^2 * div(tau)

    is evaluated on the grid ``{0} U {observed singular values}`` and the
    soft-thresholded matrix at the minimizing ``tau`` is returned along
    with that ``tau``; ties prefer the smaller threshold.
    """
    check_positive(sigma, "sigma")
    A = as_matrix(X)
    n, p, _ = _aspect(A)
    factors = svd(A)
    d = factors.d
    if d[0] == 0.0:
        return np.zeros_like(A), 0.0

    d_sep = _separate_ties(d)
    grid = np.concatenate(([0.0], np.sort(d)))
    risks = np.empty(grid.size)
    for idx, tau in enumerate(grid):
        resid = float(np.sum(np.minimum(d, tau) ** 2))
        div = _soft_threshold_divergence(d_sep, n, p, tau)
        risks[idx] = -n * p * sigma**2 + resid + 2.0 * sigma**2 * div
    best = float(grid[int(np.argmin(risks))])
    psi = np.maximum(d - best, 0.0)
    return shrink_and_rebuild(factors, psi), best


def estimate_sigma_residual(X, rank: int) -> float:
    """Residual-based noise variance estimate.

    ``sigma2 = ||X - tsvd_k(X)||^2 / (np - n k - k p + k^2)`` with
    ``rank = k``; ``rank = 0`` gives ``||X||^2 / (np)``.
    """
    A = as_matrix(X)
    n, p = A.shape
    k = int(rank)
    if k < 0:
        raise InvalidInputError("rank must be nonnegative")
    denom = n * p - n * k - k * p + k * k
    if denom <= 0:
        raise InvalidInputError(
            f"residual degrees of freedom must be positive, got {denom}"
        )
    sv = np.linalg.svd(A, compute_uv=False)
    resid = float(np.sum(sv[k:] ** 2))
    return resid / denom


@lru_cache(maxsize=None)
def marchenko_pastur_median(beta: float) -> float:
    """Median of the Marchenko-Pastur law (unit variance, ratio ``beta``).

    Solved from the CDF by adaptive quadrature of the density over its
    support ``[(1 - sqrt(beta))^2, (1 + sqrt(beta))^2]``.
    """
    if not 0 < beta <= 1:
        raise InvalidInputError(f"beta must lie in (0, 1], got {beta}")
    lo = (1.0 - np.sqrt(beta)) ** 2
    hi = (1.0 + np.sqrt(beta)) ** 2

    def density(x):
        return np.sqrt(np.maximum((hi - x) * (x - lo), 0.0)) / (2.0 * np.pi * beta * x)

    def cdf_minus_half(x):
        value, _ = scipy.integrate.quad(density, lo, x, limit=200, epsabs=1e-11)
        return value - 0.5

    return float(scipy.optimize.brentq(cdf_minus_half, lo + 1e-12, hi - 1e-12, xtol=1e-12))


def estimate_sigma_mp(X) -> float:
    """Robust noise-scale estimate from the median singular value.

    ``sigma = median(d) / sqrt(n * m_beta)`` where ``m_beta`` is the
    Marchenko-Pastur median for the matrix aspect ratio and ``n`` is the
    larger dimension.  Exactly homogeneous: scaling X scales the estimate.
    """
    A = as_matrix(X)
    n, p, beta = _aspect(A)
    if p < 2:
        raise InvalidInputError("both dimensions must be at least 2")
    d_med = float(np.median(np.linalg.svd(A, compute_uv=False)))
    return d_med / np.sqrt(n * marchenko_pastur_median(beta))
