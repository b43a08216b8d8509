"""Auto-associative models: nonlinear PCA by projection pursuit regression."""

from .data import CenteredDataset, DataMatrix, ResidualState, center, init_state, load_csv
from .errors import *  # noqa: F401,F403
from .indices import (
    Contiguity,
    ContiguityMatrix,
    DiagnosticDH,
    DiagnosticSammon,
    ProjectedVariance,
    contiguity_index,
    diagnostic_dh,
    diagnostic_sammon,
    local_covariance,
    nearest_neighbors,
    solve_axis,
    variance_index,
)
from .model import (
    AutoAssociativeModel,
    FitReport,
    check_additive,
    evaluate_F,
    fit,
    information_ratio,
    load,
    reconstruct,
    save,
    transform,
)
from .regressors import RegressorSpec, fit_kernel, fit_linear, fit_spline
from .synthetic import GeneratorSpec, generate, pca_oracle

__version__ = "0.1.0"
