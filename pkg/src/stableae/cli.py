"""Command-line front end.

Subcommands
-----------
denoise   read a matrix, run one estimator, write the estimate plus a JSON
          diagnostics sidecar
ca        correspondence analysis with optional regularization
simulate  run a study from a JSON config and emit the CSV report
cv        cross-validate the bootstrap deletion fraction

Exit codes: 0 success, 2 argument/parse errors, 3 numerical errors
(singular penalty, invalid noise model, degenerate margins).  ``SAE_SEED``
provides a default seed, overridden by ``--seed``.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .ca import CorrespondenceAnalysis, drop_empty_margins
from .errors import InvalidInputError
from .estimators import (
    IsaConfig,
    iterated_stable_autoencoder,
    stable_autoencoder,
)
from .harness import (
    StudyConfig,
    bundled_config_path,
    cross_validate_delta,
    delta_cv_errors,
    run_study,
)
from .matrixio import read_matrix, write_matrix
from .metrics import numerical_rank
from .noise import make_noise_model
from .shrinkers import (
    asymp_shrink,
    estimate_sigma_mp,
    ln_shrink,
    svst_sure,
    tsvd_k,
    tsvd_tau,
)

DENOISE_METHODS = ("sa", "isa", "tsvd-k", "tsvd-tau", "asymp", "ln", "svst")


def _resolve_seed(explicit: int | None, fallback: int | None = None) -> int | None:
    if explicit is not None:
        return explicit
    env = os.environ.get("SAE_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise InvalidInputError(f"SAE_SEED must be an integer, got {env!r}") from exc
    return fallback


def _add_io_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--in", dest="input", required=True, metavar="FILE",
                        help="input matrix (CSV or MatrixMarket .mtx)")
    parser.add_argument("--header", choices=("auto", "yes", "no"), default="auto",
                        help="whether the CSV has a header row")
    parser.add_argument("--labels", choices=("auto", "yes", "no"), default="auto",
                        help="whether the CSV has a leading label column")


def _load(args) -> np.ndarray:
    return read_matrix(args.input, header=args.header, labels=args.labels).values


def _sidecar_path(out: str) -> Path:
    return Path(out).with_suffix(".diag.json")


def _write_diag(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def _cmd_denoise(args, parser: argparse.ArgumentParser) -> int:
    if args.method in ("sa", "tsvd-k", "ln") and args.rank is None:
        parser.error(f"--method {args.method} requires --rank")
    if args.method in ("sa", "isa"):
        if args.noise is None:
            parser.error(f"--method {args.method} requires --noise")
        if args.noise == "gaussian" and args.sigma2 is None:
            parser.error("--noise gaussian requires --sigma2")

    X = _load(args)
    params = {
        "method": args.method,
        "noise": args.noise,
        "delta": args.delta,
        "sigma2": args.sigma2,
        "rank": args.rank,
    }

    if args.method in ("sa", "isa"):
        model = make_noise_model(args.noise, delta=args.delta, sigma2=args.sigma2)
        if args.method == "sa":
            result = stable_autoencoder(X, model, args.rank)
        else:
            cfg = IsaConfig(max_iterations=args.max_iterations,
                            convergence_tolerance=args.tolerance,
                            rank_tolerance=args.rank_tolerance)
            result = iterated_stable_autoencoder(X, model, cfg)
        estimate = result.estimate
        diag = {
            "effective_rank": result.effective_rank,
            "iterations": result.iterations,
            "final_residual": result.final_residual,
            "parameters": params,
        }
    else:
        sigma2 = args.sigma2
        if sigma2 is None:
            sigma2 = estimate_sigma_mp(X) ** 2
            params["sigma2_estimated"] = sigma2
        sigma = math.sqrt(sigma2)
        if args.method == "tsvd-k":
            estimate = tsvd_k(X, args.rank)
        elif args.method == "tsvd-tau":
            estimate = tsvd_tau(X, sigma)
        elif args.method == "asymp":
            estimate = asymp_shrink(X, sigma)
        elif args.method == "ln":
            estimate = ln_shrink(X, args.rank, sigma, scale=args.ln_scale)
        else:
            estimate, tau = svst_sure(X, sigma)
            params["selected_threshold"] = tau
        diag = {
            "effective_rank": numerical_rank(estimate),
            "iterations": 1,
            "final_residual": 0.0,
            "parameters": params,
        }

    write_matrix(args.out, estimate)
    _write_diag(_sidecar_path(args.out), diag)
    return 0


def _cmd_ca(args, parser: argparse.ArgumentParser) -> int:
    X = _load(args)
    if args.drop_empty:
        X, _, _ = drop_empty_margins(X)
    est = CorrespondenceAnalysis(
        rank=args.rank, regularize=args.regularize, delta=args.delta,
        max_iterations=args.max_iterations,
        convergence_tolerance=args.tolerance,
        rank_tolerance=args.rank_tolerance,
    ).fit(X)

    prefix = args.out_prefix
    write_matrix(f"{prefix}.mu.csv", est.estimate_)
    write_matrix(f"{prefix}.residuals.csv", est.fitted_residuals_)
    write_matrix(f"{prefix}.rows.csv", est.row_coordinates_)
    write_matrix(f"{prefix}.cols.csv", est.column_coordinates_)
    _write_diag(Path(f"{prefix}.diag.json"), {
        "chi_square": est.chi_square_,
        "effective_rank": est.effective_rank_,
        "iterations": est.n_iter_,
        "final_residual": est.final_residual_,
        "n_components": est.n_components_,
        "parameters": {
            "regularize": args.regularize,
            "rank": args.rank,
            "delta": args.delta,
            "drop_empty": args.drop_empty,
        },
    })
    return 0


def _cmd_simulate(args, parser: argparse.ArgumentParser) -> int:
    config_path = Path(args.config)
    if not config_path.exists():
        config_path = bundled_config_path(args.config)
    cfg = StudyConfig.from_json(config_path)
    seed = _resolve_seed(args.seed)
    if seed is not None:
        cfg = dataclasses.replace(cfg, base_seed=seed)
    report = run_study(cfg, threads=args.threads)
    sys.stdout.write(report.to_text())
    if args.out:
        report.write_csv(args.out)
    return 0


def _cmd_cv(args, parser: argparse.ArgumentParser) -> int:
    X = _load(args)
    try:
        grid = [float(tok) for tok in args.grid.split(",") if tok.strip()]
    except ValueError:
        parser.error(f"--grid must be comma-separated numbers, got {args.grid!r}")
    seed = _resolve_seed(args.seed, fallback=0)
    deltas, errors = delta_cv_errors(
        X, args.noise, grid, holdout_fraction=args.holdout,
        folds=args.folds, seed=seed, sigma2=args.sigma2,
    )
    best = cross_validate_delta(
        X, args.noise, grid, holdout_fraction=args.holdout,
        folds=args.folds, seed=seed, sigma2=args.sigma2,
    )
    for delta, err in zip(deltas, errors):
        sys.stdout.write(f"delta={delta:g}\terror={err:.17g}\n")
    sys.stdout.write(f"best delta: {best:g}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stableae",
        description="Low-rank matrix denoising via noise-stable autoencoding.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("denoise", help="denoise a matrix with one estimator")
    _add_io_flags(p)
    p.add_argument("--out", required=True, metavar="FILE", help="output CSV")
    p.add_argument("--method", choices=DENOISE_METHODS, required=True)
    p.add_argument("--noise", choices=("gaussian", "poisson"))
    p.add_argument("--sigma2", type=float, help="noise variance (gaussian / shrinkers)")
    p.add_argument("--delta", type=float, default=0.5,
                   help="bootstrap deletion fraction (default 0.5)")
    p.add_argument("--rank", type=int)
    p.add_argument("--ln-scale", choices=("sigma2", "n_sigma2"), default="sigma2")
    p.add_argument("--max-iterations", type=int, default=500)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--rank-tolerance", type=float, default=1e-7)
    p.set_defaults(func=_cmd_denoise, subparser=p)

    p = sub.add_parser("ca", help="correspondence analysis of a count table")
    _add_io_flags(p)
    p.add_argument("--out-prefix", required=True, metavar="PREFIX")
    p.add_argument("--regularize", choices=("none", "sa", "isa"), default="none")
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--drop-empty", action="store_true",
                   help="drop all-zero rows/columns instead of failing")
    p.add_argument("--max-iterations", type=int, default=500)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--rank-tolerance", type=float, default=1e-7)
    p.set_defaults(func=_cmd_ca, subparser=p)

    p = sub.add_parser("simulate", help="run a simulation study from JSON config")
    p.add_argument("--config", required=True,
                   help="config file path or bundled name (table1_desk, "
                        "poisson_desk, subsample_desk)")
    p.add_argument("--out", metavar="FILE", help="write the CSV report here")
    p.add_argument("--seed", type=int, help="override the config base seed")
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=_cmd_simulate, subparser=p)

    p = sub.add_parser("cv", help="cross-validate the deletion fraction")
    _add_io_flags(p)
    p.add_argument("--noise", choices=("gaussian", "poisson"), required=True)
    p.add_argument("--sigma2", type=float)
    p.add_argument("--grid", default="0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")
    p.add_argument("--holdout", type=float, default=0.1)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=_cmd_cv, subparser=p)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, args.subparser)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
