"""Simulation studies and the two-variable application pipeline."""

from .application import (
    MultiVariableData,
    run_application_pipeline,
    smoothing_params,
    standardize_rows,
    synthetic_bivariate,
)
from .config import ExperimentConfig, ExperimentKind, NuSXMode
from .simulate import covariance_root, field_roots, regular_grid, simulate_gp, synthetic_sites
from .spatial import nu_sx_for, regime_for, run_spatial_experiment
from .tables import ExperimentTable, TableRow, mc_row
from .timeseries import MODEL_KEYS, run_timeseries_experiment, simulate_timeseries

__all__ = [
    "ExperimentConfig",
    "ExperimentKind",
    "ExperimentTable",
    "MODEL_KEYS",
    "MultiVariableData",
    "NuSXMode",
    "TableRow",
    "covariance_root",
    "field_roots",
    "mc_row",
    "nu_sx_for",
    "regime_for",
    "regular_grid",
    "run_application_pipeline",
    "run_spatial_experiment",
    "run_timeseries_experiment",
    "simulate_gp",
    "simulate_timeseries",
    "smoothing_params",
    "standardize_rows",
    "synthetic_bivariate",
    "synthetic_sites",
]
