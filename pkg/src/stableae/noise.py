"""Bootstrap noise models: per-cell variances and pseudo-data samplers.

The estimators only consume the first two moments of the bootstrap (the
variance matrix and its column sums); :func:`sample` exists for Monte-Carlo
verification and for cell-wise cross-validation.

A model is parameterized by the deletion fraction ``delta`` in (0, 1), which
enters every variance as the multiplier ``delta / (1 - delta)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import InvalidInputError
from .validation import (
    as_count_matrix,
    as_matrix,
    as_nonnegative_matrix,
    check_delta,
    check_positive,
)


@dataclass(frozen=True)
class GaussianNoise:
    """Additive homoskedastic noise: cells perturbed by N(0, sigma2 * d/(1-d))."""

    sigma2: float
    delta: float = 0.5

    def __post_init__(self):
        check_positive(self.sigma2, "sigma2")
        check_delta(self.delta)

    def cell_variances(self, X: np.ndarray) -> np.ndarray:
        A = as_matrix(X)
        level = self.delta / (1.0 - self.delta) * self.sigma2
        return np.full(A.shape, level)

    def draw(self, X: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        A = as_matrix(X)
        scale = np.sqrt(self.delta / (1.0 - self.delta) * self.sigma2)
        return A + rng.normal(0.0, scale, size=A.shape)


@dataclass(frozen=True)
class PoissonNoise:
    """Count thinning: keep each unit count with probability 1 - delta, rescale.

    Cell variances are ``delta / (1 - delta) * X_ij`` (variance of
    ``Binomial(X_ij, 1 - delta) / (1 - delta)``), so the penalty adapts to
    the observed count magnitudes.
    """

    delta: float = 0.5

    def __post_init__(self):
        check_delta(self.delta)

    def cell_variances(self, X: np.ndarray) -> np.ndarray:
        A = as_nonnegative_matrix(X)
        return self.delta / (1.0 - self.delta) * A

    def draw(self, X: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        counts = as_count_matrix(X).astype(np.int64)
        kept = rng.binomial(counts, 1.0 - self.delta)
        return kept / (1.0 - self.delta)


NoiseModel = Union[GaussianNoise, PoissonNoise]


def make_noise_model(kind: str, delta: float = 0.5, sigma2: float | None = None) -> NoiseModel:
    """Build a noise model from string configuration (CLI / study configs)."""
    kind = kind.lower()
    if kind == "gaussian":
        if sigma2 is None:
            raise InvalidInputError("gaussian noise requires sigma2")
        return GaussianNoise(sigma2=sigma2, delta=delta)
    if kind == "poisson":
        return PoissonNoise(delta=delta)
    raise InvalidInputError(f"unknown noise kind {kind!r} (expected gaussian or poisson)")


def variance_matrix(model: NoiseModel, X) -> np.ndarray:
    """Per-cell bootstrap variances ``V_ij = Var[Xtilde_ij]``."""
    return model.cell_variances(np.asarray(X, dtype=float))


def penalty_diagonal(V) -> np.ndarray:
    """Column sums of a cell-variance matrix: the diagonal penalty."""
    Vm = as_nonnegative_matrix(V, "V")
    return Vm.sum(axis=0)


def sample(model: NoiseModel, X, rng: np.random.Generator) -> np.ndarray:
    """Draw one bootstrap pseudo-dataset. Deterministic for a fixed rng state."""
    return model.draw(np.asarray(X, dtype=float), rng)
