"""Independent oracles used to freeze expected values in the tests.

These deliberately avoid the solution paths used by the library: the
reduced-rank solve is checked against a nested grid/gradient search over
explicit rank-1 factorizations, and spectral formulas are re-evaluated by
direct substitution.
"""

from __future__ import annotations

import numpy as np
import scipy.optimize


def rank1_objective(X, penalty, a, b) -> float:
    """Entrywise evaluation of ||X - X a b'||^2 + sum_j penalty_j (a_j b_k)^2."""
    B = np.outer(a, b)
    fit = X - X @ B
    return float(np.sum(fit * fit) + np.sum(penalty[:, None] * B * B))


def brute_force_rank1(X, penalty, n_grid: int = 720) -> float:
    """Best rank-1 objective by a direction grid with inner minimization.

    For each unit direction ``b`` on a grid, the left factor ``a`` is found
    numerically (BFGS on the entrywise objective); the best grid point is
    then polished by a joint minimization over all factor entries.
    """
    X = np.asarray(X, dtype=float)
    penalty = np.asarray(penalty, dtype=float)
    p = X.shape[1]

    def inner_best(b):
        res = scipy.optimize.minimize(
            lambda a: rank1_objective(X, penalty, a, b),
            np.zeros(p), method="BFGS",
        )
        return res.fun, res.x

    best_val = np.inf
    best_pair = None
    if p == 2:
        directions = [
            np.array([np.cos(t), np.sin(t)])
            for t in np.linspace(0.0, np.pi, n_grid, endpoint=False)
        ]
    elif p == 3:
        golden = np.pi * (3.0 - np.sqrt(5.0))
        directions = []
        for i in range(n_grid):
            z = 1.0 - 2.0 * (i + 0.5) / n_grid
            r = np.sqrt(max(1.0 - z * z, 0.0))
            directions.append(np.array([r * np.cos(golden * i),
                                        r * np.sin(golden * i), z]))
    else:
        raise ValueError("oracle implemented for p in {2, 3}")

    for b in directions:
        val, a = inner_best(b)
        if val < best_val:
            best_val, best_pair = val, (a, b)

    a0, b0 = best_pair
    res = scipy.optimize.minimize(
        lambda z: rank1_objective(X, penalty, z[:p], z[p:]),
        np.concatenate([a0, b0]), method="BFGS",
        options={"maxiter": 2000, "gtol": 1e-12},
    )
    return min(best_val, float(res.fun))


def operator_loss_shrinkage(d, n_rows: int, sigma2: float) -> np.ndarray:
    """Asymptotically optimal operator-loss shrinker for square matrices.

    ``(1/sqrt(2)) * sqrt(d^2 - 2 n s + sqrt((d^2 - 2 n s)^2 - 4 n^2 s^2))``
    above the ``d^2 >= 4 n s`` threshold (s = sigma2), else 0; evaluated
    exactly as printed, independent of the fixed-point derivation.
    """
    d = np.asarray(d, dtype=float)
    s = n_rows * sigma2
    centered = d**2 - 2.0 * s
    inner = centered**2 - 4.0 * s**2
    out = np.where(
        d**2 >= 4.0 * s,
        np.sqrt(np.maximum(centered + np.sqrt(np.maximum(inner, 0.0)), 0.0))
        / np.sqrt(2.0),
        0.0,
    )
    return out


def chi_square_direct(table) -> float:
    """Classical independence statistic sum (O - E)^2 / E."""
    T = np.asarray(table, dtype=float)
    r = T.sum(axis=1)
    c = T.sum(axis=0)
    expected = np.outer(r, c) / T.sum()
    return float(np.sum((T - expected) ** 2 / expected))
