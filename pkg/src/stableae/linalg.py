"""Dense decompositions and the rank-constrained weighted least-squares solve.

Everything here is a pure function of its inputs and safe to call from
multiple threads.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import IllPosedPenaltyError, InvalidInputError
from .validation import as_matrix, as_penalty, as_vector, check_rank

# Relative eigenvalue floor below which the penalized Gram matrix is treated
# as singular (rejected, never pseudo-inverted).
GRAM_CONDITION_FLOOR = 1e-12


class SvdFactors(NamedTuple):
    """Thin SVD ``X = U @ diag(d) @ V.T`` with descending singular values.

    ``U`` is n x r and ``V`` is p x r with orthonormal columns,
    r = min(n, p).  Signs follow a deterministic convention: the first
    nonzero component of each right singular vector is positive.
    """

    U: np.ndarray
    d: np.ndarray
    V: np.ndarray


def svd(X) -> SvdFactors:
    """Full thin SVD with a deterministic sign convention.

    Parameters
    ----------
    X : array_like, shape (n, p)
        Matrix to decompose; all entries must be finite.

    Returns
    -------
    SvdFactors
        ``U, d, V`` with ``U @ diag(d) @ V.T == X`` up to round-off and
        ``d`` sorted in descending order.
    """
    A = as_matrix(X)
    U, d, Vt = np.linalg.svd(A, full_matrices=False)
    V = Vt.T
    # Make the first nonzero component of each right vector positive so
    # factor-level comparisons are reproducible across BLAS builds.
    for l in range(V.shape[1]):
        col = V[:, l]
        nz = np.nonzero(col)[0]
        if nz.size and col[nz[0]] < 0:
            V[:, l] = -col
            U[:, l] = -U[:, l]
    return SvdFactors(U=U, d=d, V=V)


def shrink_and_rebuild(factors: SvdFactors, shrunk_values) -> np.ndarray:
    """Rebuild a matrix from SVD factors with replaced singular values.

    ``shrunk_values`` must be nonnegative and have one entry per factor;
    the result is ``sum_l U[:, l] * shrunk_values[l] * V[:, l].T``.
    """
    psi = as_vector(shrunk_values, "shrunk_values")
    r = factors.d.shape[0]
    if psi.shape[0] != r:
        raise InvalidInputError(
            f"shrunk_values must have length {r}, got {psi.shape[0]}"
        )
    if np.any(psi < 0):
        raise InvalidInputError("shrunk_values must be entrywise nonnegative")
    return (factors.U * psi) @ factors.V.T


def _gram_eigh(X: np.ndarray, penalty: np.ndarray, condition_floor: float):
    """Eigendecomposition of ``G = X'X + diag(penalty)`` with a PD check."""
    G = X.T @ X
    G[np.diag_indices_from(G)] += penalty
    w, Q = np.linalg.eigh(G)
    if w[-1] <= 0 or w[0] < condition_floor * w[-1]:
        raise IllPosedPenaltyError(
            "X'X + diag(penalty) is numerically singular; the solve needs a "
            "strictly positive penalty or a full-column-rank X"
        )
    return w, Q


def solve_reduced_rank(X, penalty, rank: int,
                       condition_floor: float = GRAM_CONDITION_FLOOR) -> np.ndarray:
    """Rank-constrained minimizer of a column-weighted ridge autoencoder.

    Returns the p x p matrix ``B`` minimizing

        ||X - X B||_F^2  +  sum_j penalty[j] * ||B[j, :]||_2^2

    over matrices with ``rank(B) <= rank``.

    The unconstrained solution is ``Bhat = G^{-1} X'X`` with
    ``G = X'X + diag(penalty)``; the rank constraint is imposed by
    truncating the SVD of ``G^{1/2} Bhat`` and mapping back through
    ``G^{-1/2}``, all computed from one symmetric eigendecomposition of G.

    Raises
    ------
    IllPosedPenaltyError
        If G has an eigenvalue below ``1e-12`` times its largest.
    InvalidInputError
        If ``rank`` is outside ``[1, min(n, p)]``.
    """
    A = as_matrix(X)
    n, p = A.shape
    pen = as_penalty(penalty, p)
    k = check_rank(rank, n, p)

    w, Q = _gram_eigh(A, pen, condition_floor)
    inv_sqrt_w = 1.0 / np.sqrt(w)

    XtX = A.T @ A
    # Bhat = Q diag(1/w) Q' X'X ; C = G^{1/2} Bhat = Q diag(1/sqrt(w)) Q' X'X
    C = Q @ ((inv_sqrt_w[:, None]) * (Q.T @ XtX))
    Uc, dc, Vct = np.linalg.svd(C, full_matrices=False)
    Ck = (Uc[:, :k] * dc[:k]) @ Vct[:k]
    return Q @ (inv_sqrt_w[:, None] * (Q.T @ Ck))


def reduced_rank_objective(X, penalty, B) -> float:
    """Objective value ``||X - XB||^2 + sum_j penalty[j] ||B[j,:]||^2``."""
    A = as_matrix(X)
    pen = as_penalty(penalty, A.shape[1])
    Bm = as_matrix(B, "B")
    fit = A - A @ Bm
    return float(np.sum(fit * fit) + np.sum(pen[:, None] * Bm * Bm))


def psd_leq(A, B, tol: float = 1e-8) -> bool:
    """Whether ``A <= B`` in the positive semi-definite cone ordering.

    Both arguments must be symmetric within ``tol``; returns ``True`` iff
    the minimum eigenvalue of ``B - A`` is at least ``-tol``.
    """
    Am = as_matrix(A, "A")
    Bm = as_matrix(B, "B")
    if Am.shape != Bm.shape or Am.shape[0] != Am.shape[1]:
        raise InvalidInputError("A and B must be square matrices of equal shape")
    for M, name in ((Am, "A"), (Bm, "B")):
        if np.max(np.abs(M - M.T)) > tol:
            raise InvalidInputError(f"{name} is not symmetric within tol={tol}")
    D = 0.5 * ((Bm - Am) + (Bm - Am).T)
    return bool(np.linalg.eigvalsh(D)[0] >= -tol)
