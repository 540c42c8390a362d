"""Data-shared lasso on sparse binary designs.

Every lambda uses the per-n convention: the objective is
(1/(2n)) * RSS + lambda * sum_j pf_j * |b_j|.
"""

from ._core import (
    ConfigError,
    ConvergenceError,
    DataError,
    Design,
    DslFit,
    Error,
    GroupedDataset,
    LassoFit,
    LassoOptions,
    StructuralError,
    analyze_subgroups,
    apply_threshold,
    bootstrap_dsl,
    bootstrap_lasso,
    compute_weights,
    cv_fit,
    donoho_threshold,
    evaluate,
    fit_dsl,
    fit_dsl_at,
    fit_lasso,
    fit_path,
    fit_pooled,
    fit_separate,
    gamma_grid,
    lambda_max,
    make_synthetic,
    mse,
    read_data_dir,
    reduce_dataset,
    residual_sigma,
    soft_threshold,
    sweep_gamma,
    venn_regions,
    weight_schemes,
)

__version__ = "0.1.0"
