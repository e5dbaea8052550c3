"""Correspondence analysis of contingency tables and its regularization.

A table is standardized into the matrix of scaled residuals from
independence; classical correspondence analysis truncates its SVD, and the
regularized variants replace the truncation with a stable autoencoder (or
its iterated form) whose penalty comes from the count-thinning bootstrap.
The table's margins are column-indexed throughout, so no transposition is
applied in this module.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import DegenerateMarginError, InvalidInputError
from .estimators import EstimateResult, IsaConfig, count_rank, iterate_encoder
from .linalg import solve_reduced_rank, svd
from .metrics import numerical_rank
from .validation import as_matrix, as_nonnegative_matrix, check_delta, check_rank


@dataclass(frozen=True)
class CaDecomposition:
    """Standardized residuals of a contingency table plus its margins."""

    residuals: np.ndarray
    row_totals: np.ndarray
    col_totals: np.ndarray
    grand_total: float


def ca_transform(X) -> CaDecomposition:
    """Scaled residuals from the independence table.

    ``M = R^{-1/2} (X - r c' / N) C^{-1/2}`` with ``r``, ``c`` the row and
    column sums and ``N`` the grand total.  An exactly independent table
    (in particular any rank-1 table) maps to the zero matrix.

    Raises
    ------
    DegenerateMarginError
        If any row or column of ``X`` sums to zero.
    """
    A = as_nonnegative_matrix(X)
    r = A.sum(axis=1)
    c = A.sum(axis=0)
    if np.any(r == 0) or np.any(c == 0):
        raise DegenerateMarginError(
            "table has a zero row or column; drop or merge it first"
        )
    total = float(A.sum())
    expected = np.outer(r, c) / total
    residuals = (A - expected) / np.sqrt(np.outer(r, c))
    return CaDecomposition(
        residuals=residuals, row_totals=r, col_totals=c, grand_total=total
    )


def chi_square_stat(X) -> float:
    """Independence chi-square statistic ``N * ||M||_F^2``.

    Equals the classical ``sum (observed - expected)^2 / expected``.
    """
    dec = ca_transform(X)
    return dec.grand_total * float(np.sum(dec.residuals**2))


def ca_restore(residuals_hat, margins: CaDecomposition) -> np.ndarray:
    """Map an estimate of the residual matrix back to the count scale.

    ``mu = R^{1/2} Mhat C^{1/2} + r c' / N``; composed with
    :func:`ca_transform` this is the identity.
    """
    M = as_matrix(residuals_hat, "residuals_hat")
    r, c = margins.row_totals, margins.col_totals
    if M.shape != (r.size, c.size):
        raise InvalidInputError(
            f"residuals_hat has shape {M.shape}, margins expect {(r.size, c.size)}"
        )
    return M * np.sqrt(np.outer(r, c)) + np.outer(r, c) / margins.grand_total


def ca_penalty_from_variances(variances, margins: CaDecomposition) -> np.ndarray:
    """Column penalty on the residual scale from bootstrap cell variances.

    ``penalty[j] = (1 / c_j) * sum_i variances[i, j] / r_i``.
    """
    V = as_nonnegative_matrix(variances, "variances")
    r, c = margins.row_totals, margins.col_totals
    if V.shape != (r.size, c.size):
        raise InvalidInputError("variances shape must match the table")
    return (V / r[:, None]).sum(axis=0) / c


def ca_penalty(X, delta: float) -> np.ndarray:
    """Residual-scale penalty for the count-thinning bootstrap on ``X``."""
    check_delta(delta)
    A = as_nonnegative_matrix(X)
    margins = ca_transform(A)
    return ca_penalty_from_variances(delta / (1.0 - delta) * A, margins)


def _fit_ca(X, regularize: str, rank: int | None, delta: float,
            config: IsaConfig):
    """Shared pipeline: returns (margins, residuals_hat, encoder, result)."""
    margins = ca_transform(X)
    M = margins.residuals

    if regularize == "none":
        k = check_rank(rank, *M.shape)
        factors = svd(M)
        residuals_hat = (factors.U[:, :k] * factors.d[:k]) @ factors.V[:, :k].T
        encoder = factors.V[:, :k] @ factors.V[:, :k].T
        iterations, residual = 1, 0.0
        effective = numerical_rank(residuals_hat)
    elif regularize == "sa":
        k = check_rank(rank, *M.shape)
        penalty = ca_penalty(X, delta)
        encoder = solve_reduced_rank(M, penalty, k)
        residuals_hat = M @ encoder
        iterations, residual = 1, 0.0
        effective = numerical_rank(residuals_hat)
    elif regularize == "isa":
        penalty = ca_penalty(X, delta)
        residuals_hat, encoder, iterations, residual = iterate_encoder(
            M, penalty, config
        )
        top = float(np.linalg.svd(M, compute_uv=False)[0])
        effective = count_rank(residuals_hat, top, config.rank_tolerance)
    else:
        raise InvalidInputError(
            f"regularize must be none, sa or isa, got {regularize!r}"
        )

    result = EstimateResult(
        estimate=ca_restore(residuals_hat, margins),
        effective_rank=effective,
        iterations=iterations,
        final_residual=residual,
    )
    return margins, residuals_hat, encoder, result


def ca_classical(X, rank: int) -> EstimateResult:
    """Classical rank-``rank`` correspondence analysis reconstruction."""
    _, _, _, result = _fit_ca(X, "none", rank, 0.5, IsaConfig())
    return result


def ca_stable(X, rank: int, delta: float) -> EstimateResult:
    """Stable-autoencoder regularized correspondence analysis at fixed rank."""
    _, _, _, result = _fit_ca(X, "sa", rank, delta, IsaConfig())
    return result


def ca_isa(X, delta: float, config: IsaConfig | None = None) -> EstimateResult:
    """Iterated regularized correspondence analysis; selects rank itself."""
    _, _, _, result = _fit_ca(X, "isa", None, delta, config or IsaConfig())
    return result


def principal_coordinates(margins: CaDecomposition, residuals_hat,
                          n_axes: int) -> tuple[np.ndarray, np.ndarray]:
    """Row and column principal coordinates of a fitted residual matrix.

    Rows:    ``diag(r / N)^{-1/2} U_k D_k``
    Columns: ``diag(c / N)^{-1/2} V_k D_k``
    """
    M = as_matrix(residuals_hat, "residuals_hat")
    factors = svd(M)
    k = max(0, min(int(n_axes), factors.d.size))
    row_masses = margins.row_totals / margins.grand_total
    col_masses = margins.col_totals / margins.grand_total
    rows = (factors.U[:, :k] * factors.d[:k]) / np.sqrt(row_masses)[:, None]
    cols = (factors.V[:, :k] * factors.d[:k]) / np.sqrt(col_masses)[:, None]
    return rows, cols


def drop_empty_margins(X) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Remove all-zero rows and columns.

    Returns ``(X_kept, row_index, col_index)`` with the kept positions, so
    callers can realign labels.  Removing zero rows cannot create new zero
    columns (they contribute nothing to column sums), so one pass suffices.
    """
    A = as_nonnegative_matrix(X)
    rows = np.nonzero(A.sum(axis=1) > 0)[0]
    cols = np.nonzero(A.sum(axis=0) > 0)[0]
    return A[np.ix_(rows, cols)], rows, cols


class CorrespondenceAnalysis(TransformerMixin, BaseEstimator):
    """Correspondence analysis with optional bootstrap regularization.

    Parameters
    ----------
    rank : int, default 2
        Number of components for ``regularize in {"none", "sa"}``; ignored
        by ``"isa"``, which selects the rank itself.
    regularize : {"none", "sa", "isa"}, default "none"
    delta : float, default 0.5
        Bootstrap deletion fraction for the regularized variants.
    max_iterations, convergence_tolerance, rank_tolerance :
        Iteration controls for ``regularize="isa"``.

    Attributes
    ----------
    estimate_ : ndarray
        Denoised table on the count scale.
    fitted_residuals_ : ndarray
        Denoised standardized-residual matrix.
    row_coordinates_, column_coordinates_ : ndarray
        Principal coordinates on the fitted axes.
    chi_square_ : float
        Independence statistic of the input table.
    effective_rank_, n_iter_, final_residual_ :
        Diagnostics mirroring :class:`EstimateResult`.
    """

    def __init__(self, rank: int = 2, regularize: str = "none",
                 delta: float = 0.5, max_iterations: int = 500,
                 convergence_tolerance: float = 1e-9,
                 rank_tolerance: float = 1e-7):
        self.rank = rank
        self.regularize = regularize
        self.delta = delta
        self.max_iterations = max_iterations
        self.convergence_tolerance = convergence_tolerance
        self.rank_tolerance = rank_tolerance

    def fit(self, X, y=None):
        cfg = IsaConfig(
            max_iterations=self.max_iterations,
            convergence_tolerance=self.convergence_tolerance,
            rank_tolerance=self.rank_tolerance,
        )
        margins, residuals_hat, encoder, result = _fit_ca(
            X, self.regularize, self.rank, self.delta, cfg
        )
        self.margins_ = margins
        self.fitted_residuals_ = residuals_hat
        self.encoder_ = encoder
        self.estimate_ = result.estimate
        self.effective_rank_ = result.effective_rank
        self.n_iter_ = result.iterations
        self.final_residual_ = result.final_residual
        self.chi_square_ = margins.grand_total * float(
            np.sum(margins.residuals**2)
        )
        n_axes = self.rank if self.regularize in ("none", "sa") else result.effective_rank
        self.n_components_ = max(0, min(int(n_axes), min(residuals_hat.shape)))
        self.row_coordinates_, self.column_coordinates_ = principal_coordinates(
            margins, residuals_hat, self.n_components_
        )
        factors = svd(residuals_hat)
        self.singular_values_ = factors.d[: self.n_components_]
        # Projector used for out-of-sample rows: encoder then fitted axes.
        self._axes = factors.V[:, : self.n_components_]
        self._row_projector = encoder @ self._axes
        self.n_features_in_ = residuals_hat.shape[1]
        return self

    def transform(self, X) -> np.ndarray:
        """Principal coordinates for (possibly new) rows of counts.

        Each row is turned into its profile, centered at the fitted column
        masses, scaled, passed through the fitted encoder and projected on
        the fitted axes.  On the training table this reproduces
        ``row_coordinates_``.
        """
        if not hasattr(self, "encoder_"):
            raise InvalidInputError("this estimator is not fitted yet; call fit first")
        A = as_nonnegative_matrix(X)
        if A.shape[1] != self.n_features_in_:
            raise InvalidInputError(
                f"X has {A.shape[1]} columns, expected {self.n_features_in_}"
            )
        sums = A.sum(axis=1)
        if np.any(sums == 0):
            raise DegenerateMarginError("rows must have positive totals")
        col_masses = self.margins_.col_totals / self.margins_.grand_total
        centered = A / sums[:, None] - col_masses
        return (centered / np.sqrt(col_masses)) @ self._row_projector
