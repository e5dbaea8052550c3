"""Low-rank matrix denoising via noise-stable autoencoding.

The package turns a noise model (Gaussian or Poisson) into a data-driven
regularizer through a bootstrap, solves the resulting rank-constrained
problems in closed form, and iterates them to select the rank
automatically.  It also regularizes correspondence analysis the same way,
ships the classical singular-value shrinkers used as baselines, and
includes a reproducible simulation harness plus a command-line front end.
"""

from .ca import (
    CaDecomposition,
    CorrespondenceAnalysis,
    ca_classical,
    ca_isa,
    ca_penalty,
    ca_penalty_from_variances,
    ca_restore,
    ca_stable,
    ca_transform,
    chi_square_stat,
    drop_empty_margins,
    principal_coordinates,
)
from .errors import DegenerateMarginError, IllPosedPenaltyError, InvalidInputError
from .estimators import (
    EstimateResult,
    IsaConfig,
    IteratedStableAutoencoder,
    StableAutoencoder,
    gaussian_fixed_point_shrinkage,
    gaussian_isa_closed_form,
    gaussian_sa_closed_form,
    iterated_stable_autoencoder,
    orient,
    stable_autoencoder,
)
from .harness import (
    StudyConfig,
    StudyReport,
    cross_validate_delta,
    delta_cv_errors,
    gen_gaussian_instance,
    gen_poisson_instance,
    run_study,
    subsample_counts,
    synthetic_survey_table,
)
from .linalg import (
    SvdFactors,
    psd_leq,
    reduced_rank_objective,
    shrink_and_rebuild,
    solve_reduced_rank,
    svd,
)
from .metrics import numerical_rank, relative_mse, rv_coefficient
from .noise import (
    GaussianNoise,
    PoissonNoise,
    make_noise_model,
    penalty_diagonal,
    sample,
    variance_matrix,
)
from .shrinkers import (
    asymp_shrink,
    estimate_sigma_mp,
    estimate_sigma_residual,
    hard_threshold_constant,
    ln_shrink,
    marchenko_pastur_median,
    svst_sure,
    tsvd_k,
    tsvd_tau,
)

__version__ = "0.1.0"

__all__ = [
    "CaDecomposition",
    "CorrespondenceAnalysis",
    "DegenerateMarginError",
    "EstimateResult",
    "GaussianNoise",
    "IllPosedPenaltyError",
    "InvalidInputError",
    "IsaConfig",
    "IteratedStableAutoencoder",
    "PoissonNoise",
    "StableAutoencoder",
    "StudyConfig",
    "StudyReport",
    "SvdFactors",
    "asymp_shrink",
    "ca_classical",
    "ca_isa",
    "ca_penalty",
    "ca_penalty_from_variances",
    "ca_restore",
    "ca_stable",
    "ca_transform",
    "chi_square_stat",
    "cross_validate_delta",
    "delta_cv_errors",
    "drop_empty_margins",
    "estimate_sigma_mp",
    "estimate_sigma_residual",
    "gaussian_fixed_point_shrinkage",
    "gaussian_isa_closed_form",
    "gaussian_sa_closed_form",
    "gen_gaussian_instance",
    "gen_poisson_instance",
    "hard_threshold_constant",
    "iterated_stable_autoencoder",
    "ln_shrink",
    "make_noise_model",
    "marchenko_pastur_median",
    "numerical_rank",
    "orient",
    "penalty_diagonal",
    "principal_coordinates",
    "psd_leq",
    "reduced_rank_objective",
    "relative_mse",
    "run_study",
    "rv_coefficient",
    "sample",
    "shrink_and_rebuild",
    "solve_reduced_rank",
    "stable_autoencoder",
    "subsample_counts",
    "svd",
    "svst_sure",
    "synthetic_survey_table",
    "tsvd_k",
    "tsvd_tau",
    "variance_matrix",
]
