"""Simulation studies: instance generators, study runner, cross-validation.

Reproducibility contract: every replication derives its own random stream
from ``(base_seed, cell_index, replication_index)`` through a seed
sequence, so a study produces bit-identical reports regardless of how many
worker threads execute it.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .ca import (
    ca_penalty,
    ca_transform,
    principal_coordinates,
)
from .errors import InvalidInputError
from .estimators import (
    IsaConfig,
    count_rank,
    iterate_encoder,
    iterated_stable_autoencoder,
    stable_autoencoder,
)
from .linalg import solve_reduced_rank, svd
from .metrics import numerical_rank, relative_mse, rv_coefficient
from .noise import GaussianNoise, PoissonNoise, make_noise_model
from .shrinkers import (
    asymp_shrink,
    estimate_sigma_mp,
    estimate_sigma_residual,
    ln_shrink,
    marchenko_pastur_median,
    svst_sure,
    tsvd_k,
    tsvd_tau,
)
from .validation import as_count_matrix, as_matrix, check_delta

SCENARIOS = ("gaussian_table1", "poisson_tables", "subsample_stability")

DEFAULT_METHODS = {
    "gaussian_table1": ("sa", "isa", "tsvd_k", "tsvd_tau", "asymp", "svst", "ln"),
    "poisson_tables": ("sa", "isa", "tsvd_k", "tsvd_tau", "asymp", "ln"),
    "subsample_stability": ("ca", "ca_sa", "ca_isa", "ca_ln"),
}

# Reporting tolerance for the rank of shrinker estimates: components below
# 1% of the top singular value do not count as recovered structure.  The
# iterated estimator reports its own effective rank (protected by a
# spectral gap), so it keeps the tight internal tolerance.
SHRINKER_RANK_TOL = 1e-2


def _rng_from(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.default_rng(seed)
    return np.random.default_rng(np.random.SeedSequence(seed))


def _task_rng(base_seed: int, cell_index: int, rep_index: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence((int(base_seed), int(cell_index), int(rep_index)))
    )


def gen_gaussian_instance(n_rows: int, n_cols: int, rank: int, snr: float, seed):
    """Rank-``rank`` Gaussian-noise instance.

    The signal is a product of two i.i.d. standard normal factor matrices,
    rescaled to unit Frobenius norm; the noise level is
    ``sigma = 1 / (snr * sqrt(n p))`` so the total noise energy is
    ``1 / snr^2``.  Returns ``(signal, observed)``.
    """
    if rank > min(n_rows, n_cols):
        raise InvalidInputError("rank must not exceed min(n_rows, n_cols)")
    rng = _rng_from(seed)
    left = rng.standard_normal((n_rows, rank))
    right = rng.standard_normal((n_cols, rank))
    signal = left @ right.T
    signal /= np.linalg.norm(signal)
    sigma = 1.0 / (snr * math.sqrt(n_rows * n_cols))
    observed = signal + rng.normal(0.0, sigma, size=signal.shape)
    return signal, observed


# Geometry of the rank-3 Poisson signal: three bumps on disjoint blocks of
# the 50 x 20 grid with decreasing footprint -- a broad, nearly flat
# diffuse component, a mid-width bump, and a small patch concentrated in
# the bottom-right corner.  Disjoint supports make the components exactly
# orthogonal, so the singular values of the sum sit in the exact
# 1.1 : 1.4 : 1 ratio by construction.  The per-component floor sets how
# peaked each bump is relative to its base level.
_POISSON_SHAPE = (50, 20)
_ROW_BLOCKS = ((0, 35), (35, 47), (47, 50))
_COL_BLOCKS = ((0, 14), (14, 18), (18, 20))
_COMPONENT_SCALES = (1.1, 1.4, 1.0)
_BUMP_FLOORS = (3.0, 0.12, 0.12)


def _bump(length: int, floor: float) -> np.ndarray:
    t = (np.arange(length) + 0.5) / length
    return floor + np.sin(np.pi * t) ** 2


@lru_cache(maxsize=1)
def _poisson_signal_base() -> np.ndarray:
    n, p = _POISSON_SHAPE
    base = np.zeros((n, p))
    for scale, floor, (r0, r1), (c0, c1) in zip(
        _COMPONENT_SCALES, _BUMP_FLOORS, _ROW_BLOCKS, _COL_BLOCKS
    ):
        u = np.zeros(n)
        u[r0:r1] = _bump(r1 - r0, floor)
        v = np.zeros(p)
        v[c0:c1] = _bump(c1 - c0, floor)
        base += scale * np.outer(u / np.linalg.norm(u), v / np.linalg.norm(v))
    return base


def gen_poisson_instance(n_total: float, seed):
    """Rank-3 Poisson-count instance on a 50 x 20 grid.

    The signal has singular values in the exact ratio 1.1 : 1.4 : 1 and
    total mass ``n_total``; counts are independent Poisson draws with the
    signal as mean.  Returns ``(signal, counts)``.
    """
    if n_total <= 0:
        raise InvalidInputError("n_total must be positive")
    rng = _rng_from(seed)
    base = _poisson_signal_base()
    signal = base * (float(n_total) / base.sum())
    counts = rng.poisson(signal).astype(float)
    return signal, counts


def subsample_counts(X, n_sub: int, seed) -> np.ndarray:
    """Draw ``n_sub`` of the unit counts in ``X`` without replacement.

    Multivariate hypergeometric over cells; the output has grand total
    exactly ``n_sub`` and never exceeds ``X`` cellwise.
    """
    counts = as_count_matrix(X).astype(np.int64)
    total = int(counts.sum())
    n_sub = int(n_sub)
    if not 0 < n_sub <= total:
        raise InvalidInputError(f"n_sub must lie in (0, {total}], got {n_sub}")
    rng = _rng_from(seed)
    drawn = rng.multivariate_hypergeometric(counts.ravel(), n_sub)
    return drawn.reshape(counts.shape).astype(float)


@lru_cache(maxsize=1)
def synthetic_survey_table() -> np.ndarray:
    """Bundled synthetic 12 x 39 count table (grand total 1075).

    Mimics a small word-association survey: two dominant association axes
    on top of an independence backbone.  The table is the deterministic
    expected-count table of the model (largest-remainder rounding), so the
    two leading axes stand well clear of the rounding tail and column
    totals stay away from zero for moderate subsamples.
    """
    n, p, total = 12, 39, 1075
    rng = np.random.default_rng(np.random.SeedSequence((n, p, total)))
    row_a = np.linspace(-1.0, 1.0, n)
    row_b = np.cos(np.linspace(0.0, 3.0 * np.pi, n))
    col_a = np.sin(np.linspace(0.0, 2.0 * np.pi, p))
    col_b = np.linspace(1.0, -1.0, p)
    popularity = 0.6 + rng.random(p)
    log_rate = (
        np.log(popularity)[None, :]
        + 2.3 * np.outer(row_a, col_a)
        + 1.5 * np.outer(row_b, col_b)
    )
    rate = np.exp(log_rate)
    expected = rate / rate.sum() * total
    floors = np.floor(expected)
    deficit = int(round(total - floors.sum()))
    remainders = (expected - floors).ravel()
    bumped = floors.ravel()
    bumped[np.argsort(-remainders)[:deficit]] += 1
    return bumped.reshape(n, p)


@dataclass(frozen=True)
class StudyConfig:
    """Configuration of one simulation study (JSON-serializable)."""

    scenario: str
    replications: int = 20
    base_seed: int = 0
    methods: tuple[str, ...] = ()
    delta: float = 0.5
    snr_list: tuple[float, ...] = (0.5, 1.0, 2.0, 4.0)
    k_list: tuple[int, ...] = (10, 100)
    n_list: tuple[float, ...] = ()
    n_rows: int = 200
    n_cols: int = 500
    subsample_size: int = 200
    ca_rank: int = 2
    table_path: str | None = None

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise InvalidInputError(
                f"scenario must be one of {SCENARIOS}, got {self.scenario!r}"
            )
        if self.replications < 1:
            raise InvalidInputError("replications must be >= 1")
        if self.base_seed < 0:
            raise InvalidInputError("base_seed must be nonnegative")
        check_delta(self.delta)
        if not self.methods:
            object.__setattr__(self, "methods", DEFAULT_METHODS[self.scenario])
        else:
            object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "snr_list", tuple(self.snr_list))
        object.__setattr__(self, "k_list", tuple(int(k) for k in self.k_list))
        object.__setattr__(self, "n_list", tuple(self.n_list))

    @classmethod
    def from_json(cls, path) -> "StudyConfig":
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
        return cls(**data)

    def to_json(self, path) -> None:
        data = asdict(self)
        data["methods"] = list(self.methods)
        data["snr_list"] = list(self.snr_list)
        data["k_list"] = list(self.k_list)
        data["n_list"] = list(self.n_list)
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(data, handle, indent=2)
            handle.write("\n")


@dataclass(frozen=True)
class StudyRow:
    scenario: str
    cell: dict
    method: str
    mse_mean: float
    rv_row_mean: float
    rv_col_mean: float
    rank_mean: float
    replications: int
    seed: int

    def cell_label(self) -> str:
        return ";".join(f"{key}={value:g}" for key, value in self.cell.items())


@dataclass(frozen=True)
class StudyReport:
    rows: tuple[StudyRow, ...]

    CSV_HEADER = (
        "scenario,cell,method,mse_mean,rv_row_mean,rv_col_mean,rank_mean,"
        "replications,seed"
    )

    def to_csv(self) -> str:
        lines = [self.CSV_HEADER]
        for row in self.rows:
            values = ",".join(
                f"{v:.17g}" for v in (
                    row.mse_mean, row.rv_row_mean, row.rv_col_mean, row.rank_mean
                )
            )
            lines.append(
                f"{row.scenario},{row.cell_label()},{row.method},{values},"
                f"{row.replications},{row.seed}"
            )
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        Path(path).write_text(self.to_csv(), encoding="utf-8")

    def to_text(self) -> str:
        headers = ["cell", "method", "mse", "rv_row", "rv_col", "rank"]
        table = [headers]
        for row in self.rows:
            table.append([
                row.cell_label(),
                row.method,
                f"{row.mse_mean:.4g}",
                f"{row.rv_row_mean:.4g}",
                f"{row.rv_col_mean:.4g}",
                f"{row.rank_mean:.4g}",
            ])
        widths = [max(len(line[i]) for line in table) for i in range(len(headers))]
        lines = ["  ".join(cell.ljust(w) for cell, w in zip(line, widths)).rstrip()
                 for line in table]
        lines.insert(1, "  ".join("-" * w for w in widths))
        return "\n".join(lines) + "\n"

    def select(self, method: str | None = None, **cell_filters):
        """Rows matching a method and exact cell parameter values."""
        out = []
        for row in self.rows:
            if method is not None and row.method != method:
                continue
            if any(row.cell.get(k) != v for k, v in cell_filters.items()):
                continue
            out.append(row)
        return out


def _top_factors(matrix: np.ndarray, k: int):
    factors = svd(matrix)
    return factors.U[:, :k], factors.V[:, :k]


def _safe_rv(reference, estimate) -> float:
    try:
        return rv_coefficient(reference, estimate)
    except InvalidInputError:
        return float("nan")


_NAN_METRICS = (float("nan"),) * 4


def _gaussian_task(cfg: StudyConfig, cell: dict, rng: np.random.Generator) -> dict:
    k = int(cell["k"])
    snr = float(cell["snr"])
    signal, observed = gen_gaussian_instance(cfg.n_rows, cfg.n_cols, k, snr, rng)
    sigma = 1.0 / (snr * math.sqrt(cfg.n_rows * cfg.n_cols))
    u_true, v_true = _top_factors(signal, k)

    out = {}
    for method in cfg.methods:
        try:
            restrict_rv = False
            if method == "sa":
                res = stable_autoencoder(
                    observed, GaussianNoise(sigma**2, cfg.delta), k
                )
                estimate, rank = res.estimate, res.effective_rank
            elif method == "isa":
                res = iterated_stable_autoencoder(
                    observed, GaussianNoise(sigma**2, cfg.delta)
                )
                estimate, rank = res.estimate, res.effective_rank
                restrict_rv = res.effective_rank < k
            elif method == "tsvd_k":
                estimate = tsvd_k(observed, k)
                rank = numerical_rank(estimate, SHRINKER_RANK_TOL)
            elif method == "tsvd_tau":
                estimate = tsvd_tau(observed, sigma)
                rank = numerical_rank(estimate, SHRINKER_RANK_TOL)
            elif method == "asymp":
                estimate = asymp_shrink(observed, sigma)
                rank = numerical_rank(estimate, SHRINKER_RANK_TOL)
            elif method == "svst":
                estimate, _ = svst_sure(observed, sigma)
                rank = numerical_rank(estimate, SHRINKER_RANK_TOL)
            elif method == "ln":
                estimate = ln_shrink(observed, k, sigma)
                rank = numerical_rank(estimate, SHRINKER_RANK_TOL)
            else:
                raise InvalidInputError(f"unknown gaussian method {method!r}")
        except InvalidInputError:
            out[method] = _NAN_METRICS
            continue
        mse = relative_mse(estimate, signal)
        if restrict_rv:
            rv_row = rv_col = float("nan")
        else:
            u_hat, v_hat = _top_factors(estimate, k)
            rv_row = _safe_rv(u_true, u_hat)
            rv_col = _safe_rv(v_true, v_hat)
        out[method] = (mse, rv_row, rv_col, float(rank))
    return out


_POISSON_TRUE_RANK = 3


def _poisson_task(cfg: StudyConfig, cell: dict, rng: np.random.Generator) -> dict:
    n_total = float(cell["n_total"])
    signal, observed = gen_poisson_instance(n_total, rng)
    k = _POISSON_TRUE_RANK
    u_true, v_true = _top_factors(signal, k)
    # Reported errors are on the normalized signal; the relative MSE is
    # scale-invariant, so dividing by the grand total changes nothing.

    sigma_mp = None

    out = {}
    for method in cfg.methods:
        try:
            restrict_rv = False
            if method == "sa":
                res = stable_autoencoder(observed, PoissonNoise(cfg.delta), k)
                estimate, rank = res.estimate, res.effective_rank
            elif method == "isa":
                res = iterated_stable_autoencoder(observed, PoissonNoise(cfg.delta))
                estimate, rank = res.estimate, res.effective_rank
                restrict_rv = res.effective_rank < k
            elif method == "tsvd_k":
                estimate = tsvd_k(observed, k)
                rank = numerical_rank(estimate, SHRINKER_RANK_TOL)
            elif method in ("tsvd_tau", "asymp"):
                if sigma_mp is None:
                    sigma_mp = estimate_sigma_mp(observed)
                shrink = tsvd_tau if method == "tsvd_tau" else asymp_shrink
                estimate = shrink(observed, sigma_mp)
                rank = numerical_rank(estimate, SHRINKER_RANK_TOL)
            elif method == "ln":
                sigma_ln = math.sqrt(estimate_sigma_residual(observed, k))
                estimate = ln_shrink(observed, k, sigma_ln)
                rank = numerical_rank(estimate, SHRINKER_RANK_TOL)
            else:
                raise InvalidInputError(f"unknown poisson method {method!r}")
        except InvalidInputError:
            out[method] = _NAN_METRICS
            continue
        mse = relative_mse(estimate, signal)
        if restrict_rv:
            rv_row = rv_col = float("nan")
        else:
            u_hat, v_hat = _top_factors(estimate, k)
            rv_row = _safe_rv(u_true, u_hat)
            rv_col = _safe_rv(v_true, v_hat)
        out[method] = (mse, rv_row, rv_col, float(rank))
    return out


def _subsample_task(cfg: StudyConfig, cell: dict, rng: np.random.Generator,
                    table: np.ndarray, pop_rows: np.ndarray,
                    pop_cols: np.ndarray) -> dict:
    k = cfg.ca_rank
    out = {}
    try:
        sub = subsample_counts(table, int(cell["n_sub"]), rng)
        margins = ca_transform(sub)
    except InvalidInputError:
        return {method: _NAN_METRICS for method in cfg.methods}
    residuals = margins.residuals

    for method in cfg.methods:
        try:
            if method == "ca":
                fitted = tsvd_k(residuals, k)
                rank = float(numerical_rank(fitted))
            elif method == "ca_sa":
                penalty = ca_penalty(sub, cfg.delta)
                fitted = residuals @ solve_reduced_rank(residuals, penalty, k)
                rank = float(numerical_rank(fitted))
            elif method == "ca_isa":
                penalty = ca_penalty(sub, cfg.delta)
                fitted, _, _, _ = iterate_encoder(residuals, penalty, IsaConfig())
                top = float(np.linalg.svd(residuals, compute_uv=False)[0])
                rank = float(count_rank(fitted, top, IsaConfig().rank_tolerance))
            elif method == "ca_ln":
                sigma_ln = math.sqrt(estimate_sigma_residual(residuals, k))
                fitted = ln_shrink(residuals, k, sigma_ln)
                rank = float(numerical_rank(fitted))
            else:
                raise InvalidInputError(f"unknown subsample method {method!r}")
            est_rows, est_cols = principal_coordinates(margins, fitted, k)
            rv_row = _safe_rv(pop_rows, est_rows)
            rv_col = _safe_rv(pop_cols, est_cols)
        except InvalidInputError:
            out[method] = _NAN_METRICS
            continue
        out[method] = (float("nan"), rv_row, rv_col, rank)
    return out


def _study_cells(cfg: StudyConfig) -> list[dict]:
    if cfg.scenario == "gaussian_table1":
        return [
            {"k": float(k), "snr": float(snr)}
            for k in cfg.k_list
            for snr in cfg.snr_list
        ]
    if cfg.scenario == "poisson_tables":
        if not cfg.n_list:
            raise InvalidInputError("poisson_tables needs a non-empty n_list")
        return [{"n_total": float(n)} for n in cfg.n_list]
    sizes = cfg.n_list if cfg.n_list else (cfg.subsample_size,)
    return [{"n_sub": float(n)} for n in sizes]


def run_study(cfg: StudyConfig, threads: int | None = None) -> StudyReport:
    """Run every (cell, replication, method) task and aggregate the means.

    A method failure on one replication (for example a singular penalty
    caused by an empty count column) leaves NaNs for that cell, which are
    skipped by the aggregation.  ``threads`` defaults to the available
    parallelism; results do not depend on it.
    """
    cells = _study_cells(cfg)

    if cfg.scenario == "subsample_stability":
        if cfg.table_path is not None:
            table = as_count_matrix(
                np.loadtxt(cfg.table_path, delimiter=",", ndmin=2)
            )
        else:
            table = synthetic_survey_table()
        pop_margins = ca_transform(table)
        pop_rows, pop_cols = principal_coordinates(
            pop_margins, pop_margins.residuals, cfg.ca_rank
        )

        def task(cell, rng):
            return _subsample_task(cfg, cell, rng, table, pop_rows, pop_cols)

    elif cfg.scenario == "poisson_tables":
        # Warm the Marchenko-Pastur cache before any worker threads start.
        n, p = _POISSON_SHAPE
        marchenko_pastur_median(p / n)

        def task(cell, rng):
            return _poisson_task(cfg, cell, rng)

    else:
        def task(cell, rng):
            return _gaussian_task(cfg, cell, rng)

    jobs = [
        (ci, cell, rep)
        for ci, cell in enumerate(cells)
        for rep in range(cfg.replications)
    ]

    def run_job(job):
        ci, cell, rep = job
        return ci, rep, task(cell, _task_rng(cfg.base_seed, ci, rep))

    results: dict[tuple[int, int], dict] = {}
    n_workers = threads if threads is not None else (os.cpu_count() or 1)
    if n_workers <= 1 or len(jobs) == 1:
        for job in jobs:
            ci, rep, payload = run_job(job)
            results[(ci, rep)] = payload
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            for ci, rep, payload in pool.map(run_job, jobs):
                results[(ci, rep)] = payload

    rows = []
    for ci, cell in enumerate(cells):
        for method in cfg.methods:
            stacked = np.array(
                [results[(ci, rep)][method] for rep in range(cfg.replications)]
            )
            means = np.array([
                np.mean(col[np.isfinite(col)]) if np.any(np.isfinite(col))
                else np.nan
                for col in stacked.T
            ])
            rows.append(
                StudyRow(
                    scenario=cfg.scenario,
                    cell=dict(cell),
                    method=method,
                    mse_mean=float(means[0]),
                    rv_row_mean=float(means[1]),
                    rv_col_mean=float(means[2]),
                    rank_mean=float(means[3]),
                    replications=cfg.replications,
                    seed=cfg.base_seed,
                )
            )
    return StudyReport(rows=tuple(rows))


def _additive_fill(X: np.ndarray, mask: np.ndarray, nonnegative: bool) -> np.ndarray:
    """Replace masked cells with a row-plus-column-effect fit of the rest."""
    visible = ~mask
    row_means = np.array([
        X[i, visible[i]].mean() if visible[i].any() else 0.0
        for i in range(X.shape[0])
    ])
    col_means = np.array([
        X[visible[:, j], j].mean() if visible[:, j].any() else 0.0
        for j in range(X.shape[1])
    ])
    grand = X[visible].mean()
    filled = X.copy()
    fit = row_means[:, None] + col_means[None, :] - grand
    if nonnegative:
        fit = np.maximum(fit, 0.0)
    filled[mask] = fit[mask]
    return filled


def _draw_mask(shape, holdout_fraction: float, rng) -> np.ndarray:
    """Mask an exact fraction of cells, never emptying a row or column."""
    n, p = shape
    n_masked = max(1, int(round(holdout_fraction * n * p)))
    for _ in range(1000):
        flat = rng.choice(n * p, size=n_masked, replace=False)
        mask = np.zeros(n * p, dtype=bool)
        mask[flat] = True
        mask = mask.reshape(n, p)
        if mask.all(axis=1).any() or mask.all(axis=0).any():
            continue
        return mask
    raise InvalidInputError(
        "could not draw a holdout mask keeping every row and column visible"
    )


def delta_cv_errors(X, model_kind: str, delta_grid, holdout_fraction: float = 0.1,
                    folds: int = 5, seed: int = 0, sigma2: float | None = None,
                    config: IsaConfig | None = None, refinements: int = 3):
    """Cell-wise cross-validation curve for the deletion fraction.

    For each fold a random fraction of cells is masked and replaced by an
    additive row/column fit of the visible cells; the iterated estimator is
    run at every ``delta`` on the filled matrix and scored by squared error
    on the masked cells against their observed values.  After the additive
    initialization the masked cells are re-imputed ``refinements`` times
    from the estimator's own fit, so the score reflects how well each
    ``delta`` predicts held-out cells rather than how hard it shrinks the
    initial fill.

    Returns ``(grid, mean_errors)`` with the grid sorted ascending.
    """
    A = as_matrix(X)
    grid = np.sort(np.unique([check_delta(d) for d in delta_grid]))
    if grid.size == 0:
        raise InvalidInputError("delta_grid must be non-empty")
    if not 0.0 < holdout_fraction < 0.5:
        raise InvalidInputError("holdout_fraction must lie in (0, 0.5)")
    if folds < 1:
        raise InvalidInputError("folds must be >= 1")
    kind = model_kind.lower()
    if kind == "gaussian" and sigma2 is None:
        sigma2 = estimate_sigma_mp(A) ** 2
    cfg = config or IsaConfig()
    nonneg = kind == "poisson"

    errors = np.zeros((folds, grid.size))
    root = np.random.SeedSequence((int(seed), 7_310_441))
    for f, child in enumerate(root.spawn(folds)):
        rng = np.random.default_rng(child)
        mask = _draw_mask(A.shape, holdout_fraction, rng)
        start = _additive_fill(A, mask, nonnegative=nonneg)
        for j, delta in enumerate(grid):
            model = make_noise_model(kind, delta=float(delta), sigma2=sigma2)
            filled = start
            result = iterated_stable_autoencoder(filled, model, cfg)
            for _ in range(refinements):
                refit = result.estimate[mask]
                if nonneg:
                    refit = np.maximum(refit, 0.0)
                filled = filled.copy()
                filled[mask] = refit
                result = iterated_stable_autoencoder(filled, model, cfg)
            diff = result.estimate[mask] - A[mask]
            errors[f, j] = float(np.mean(diff**2))
    return grid, errors.mean(axis=0)


def cross_validate_delta(X, model_kind: str, delta_grid,
                         holdout_fraction: float = 0.1, folds: int = 5,
                         seed: int = 0, sigma2: float | None = None,
                         config: IsaConfig | None = None) -> float:
    """Pick the deletion fraction minimizing the cell-wise holdout error.

    Ties resolve to the smaller value. See :func:`delta_cv_errors`.
    """
    grid, errors = delta_cv_errors(
        X, model_kind, delta_grid, holdout_fraction, folds, seed, sigma2, config
    )
    return float(grid[int(np.argmin(errors))])


def bundled_config_path(name: str) -> Path:
    """Path of a packaged study configuration such as ``table1_desk``."""
    stem = name[:-5] if name.endswith(".json") else name
    path = Path(__file__).parent / "configs" / f"{stem}.json"
    if not path.exists():
        available = sorted(p.stem for p in path.parent.glob("*.json"))
        raise InvalidInputError(
            f"unknown bundled config {name!r}; available: {available}"
        )
    return path
