"""Spatial confounding under Gaussian-process regression with Matérn errors.

Tools to build Matérn covariance matrices, fit regression coefficients by
GLS and maximum likelihood, classify the large-sample limit of the
coefficient estimate when the covariate is smoother or rougher than the
error process, and reproduce the accompanying simulation studies.
"""

__version__ = "0.1.0"

from .covkernel import (
    CovMatrix,
    DistanceCache,
    MaternParams,
    build_cov_matrix,
    cross_cov,
    matern_cov,
    matrix_power,
)
from .dataio import standardize_per_replicate
from .errors import (
    ConfigError,
    ConvergenceError,
    DataFormatError,
    DegenerateColumnError,
    DegenerateDesignError,
    DuplicateLocationError,
    GPConfoundError,
    InputOrderError,
    NotPositiveDefiniteError,
    ParameterDomainError,
    RankDeficiencyError,
    RegimeError,
)
from .regression import (
    EstimationResult,
    FitConfig,
    RegressionDataset,
    fit_ml,
    gls_estimate,
    krig_predict,
    neg_loglik,
    profile_loglik,
)
from .smoothing import LowessConfig, cov_power_smooth, lowess
from .spectral import (
    LimitRegime,
    ObservationMode,
    Regime,
    SpectralModel,
    an_bn_terms,
    beta_infinity_expectation,
    classify_limit,
    eigenbasis_beta_hat,
    eigenbasis_beta_path,
    sobolev_norm_sq,
)

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "CovMatrix",
    "DataFormatError",
    "DegenerateColumnError",
    "DegenerateDesignError",
    "DistanceCache",
    "DuplicateLocationError",
    "EstimationResult",
    "FitConfig",
    "GPConfoundError",
    "InputOrderError",
    "LimitRegime",
    "LowessConfig",
    "MaternParams",
    "NotPositiveDefiniteError",
    "ObservationMode",
    "ParameterDomainError",
    "RankDeficiencyError",
    "Regime",
    "RegimeError",
    "RegressionDataset",
    "SpectralModel",
    "an_bn_terms",
    "beta_infinity_expectation",
    "build_cov_matrix",
    "classify_limit",
    "cov_power_smooth",
    "cross_cov",
    "eigenbasis_beta_hat",
    "eigenbasis_beta_path",
    "fit_ml",
    "gls_estimate",
    "krig_predict",
    "lowess",
    "matern_cov",
    "matrix_power",
    "neg_loglik",
    "profile_loglik",
    "sobolev_norm_sq",
    "standardize_per_replicate",
]
