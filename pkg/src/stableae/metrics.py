"""Evaluation metrics for denoising studies."""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError
from .validation import as_matrix


def relative_mse(estimate, truth) -> float:
    """Squared Frobenius error of ``estimate`` relative to ``||truth||^2``."""
    A = as_matrix(estimate, "estimate")
    B = as_matrix(truth, "truth")
    if A.shape != B.shape:
        raise InvalidInputError(
            f"shape mismatch: estimate {A.shape} vs truth {B.shape}"
        )
    denom = float(np.sum(B * B))
    if denom == 0.0:
        raise InvalidInputError("truth must be nonzero")
    diff = A - B
    return float(np.sum(diff * diff)) / denom


def rv_coefficient(U, U_hat) -> float:
    """Similarity in [0, 1] between the column spans of two matrices.

    A matrix analogue of squared correlation:
    ``tr(U' Uh Uh' U) / sqrt(tr((U'U)^2) tr((Uh'Uh)^2))``.  Invariant to
    right-multiplication of either argument by an orthogonal matrix.
    """
    A = as_matrix(U, "U")
    B = as_matrix(U_hat, "U_hat")
    if A.shape[0] != B.shape[0]:
        raise InvalidInputError(
            f"row counts must match: {A.shape[0]} vs {B.shape[0]}"
        )
    if not np.any(A) or not np.any(B):
        raise InvalidInputError("inputs must be nonzero")
    cross = A.T @ B
    num = float(np.sum(cross * cross))
    gram_a = A.T @ A
    gram_b = B.T @ B
    denom = np.sqrt(float(np.sum(gram_a * gram_a)) * float(np.sum(gram_b * gram_b)))
    return num / denom


def numerical_rank(A, rel_tol: float = 1e-7) -> int:
    """Count of singular values above ``rel_tol`` times the largest one.

    The zero matrix has rank 0.
    """
    if rel_tol <= 0:
        raise InvalidInputError("rel_tol must be positive")
    M = as_matrix(A, "A")
    sv = np.linalg.svd(M, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > rel_tol * sv[0]))
