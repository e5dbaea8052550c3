"""Input validation helpers shared across the package."""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError


def as_matrix(X, name: str = "X") -> np.ndarray:
    """Coerce ``X`` to a 2-D float64 array with finite entries."""
    A = np.asarray(X, dtype=np.float64)
    if A.ndim == 1:
        A = A.reshape(1, -1)
    if A.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-dimensional, got ndim={A.ndim}")
    if A.size == 0:
        raise InvalidInputError(f"{name} must be non-empty")
    if not np.all(np.isfinite(A)):
        raise InvalidInputError(f"{name} must contain only finite values")
    return A


def as_nonnegative_matrix(X, name: str = "X") -> np.ndarray:
    A = as_matrix(X, name)
    if np.any(A < 0):
        raise InvalidInputError(f"{name} must be entrywise nonnegative")
    return A


def as_count_matrix(X, name: str = "X", tol: float = 1e-9) -> np.ndarray:
    """Validate a matrix of nonnegative integer counts (within ``tol``)."""
    A = as_nonnegative_matrix(X, name)
    rounded = np.rint(A)
    if np.any(np.abs(A - rounded) > tol):
        raise InvalidInputError(f"{name} must contain integer counts")
    return rounded


def as_vector(v, name: str = "v") -> np.ndarray:
    a = np.asarray(v, dtype=np.float64)
    if a.ndim != 1:
        raise InvalidInputError(f"{name} must be 1-dimensional, got ndim={a.ndim}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError(f"{name} must contain only finite values")
    return a


def as_penalty(values, n_cols: int, name: str = "penalty") -> np.ndarray:
    """Validate the diagonal of a column penalty: length ``n_cols``, >= 0."""
    a = as_vector(values, name)
    if a.shape[0] != n_cols:
        raise InvalidInputError(
            f"{name} must have length {n_cols}, got {a.shape[0]}"
        )
    if np.any(a < 0):
        raise InvalidInputError(f"{name} must be entrywise nonnegative")
    return a


def check_rank(k: int, n_rows: int, n_cols: int, name: str = "rank") -> int:
    if int(k) != k:
        raise InvalidInputError(f"{name} must be an integer, got {k!r}")
    k = int(k)
    if not 1 <= k <= min(n_rows, n_cols):
        raise InvalidInputError(
            f"{name} must be in [1, {min(n_rows, n_cols)}], got {k}"
        )
    return k


def check_delta(delta: float, name: str = "delta") -> float:
    delta = float(delta)
    if not 0.0 < delta < 1.0 or not np.isfinite(delta):
        raise InvalidInputError(f"{name} must lie in (0, 1), got {delta}")
    return delta


def check_positive(value: float, name: str) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise InvalidInputError(f"{name} must be positive, got {value}")
    return value
