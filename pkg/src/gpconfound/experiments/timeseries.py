"""One-dimensional study: rough versus lowess-smoothed covariates.

For each replicate and sample size ``n`` the covariate ``X`` is a Matérn
path on a regular grid, the data are ``Y = S X + Z`` with ``S`` a lowess
smoother, and ``beta`` is estimated twice: with the rough ``X`` as covariate
(model 1) and with a differently smoothed ``X`` (model 2). Kind 1 uses the
true covariance of ``Z``; kinds 2 and 3 estimate the Matérn parameters
(and, for kind 3, a nugget) jointly with ``beta``.
"""

import numpy as np

from ..covkernel import build_cov_matrix
from ..errors import ConvergenceError, GPConfoundError
from ..regression import FitConfig, RegressionDataset, fit_ml, gls_estimate
from ..smoothing import lowess
from ._parallel import pmap
from .config import ExperimentConfig, ExperimentKind
from .simulate import regular_grid, simulate_gp
from .tables import ExperimentTable, mc_row

MODEL_KEYS = ("model1", "model2")
_KINDS = (ExperimentKind.Timeseries1, ExperimentKind.Timeseries2, ExperimentKind.Timeseries3)


def simulate_timeseries(config: ExperimentConfig, replicate: int, n: int):
    """Grid, rough covariate, smoothed covariate used for fitting, and response."""
    s = regular_grid(n, *config.domain)
    x = simulate_gp(s, config.generator, seed=[config.base_seed, replicate, n, 0], method="cholesky")
    sx = lowess(s, x, config.true_smoother)
    z = simulate_gp(s, config.noise, seed=[config.base_seed, replicate, n, 1], method="cholesky")
    y = config.beta * sx + z
    return s, x, lowess(s, x, config.fit_smoother), y


def _estimate(config: ExperimentConfig, s, covariate, y):
    if config.experiment_kind is ExperimentKind.Timeseries1:
        beta, _ = gls_estimate(covariate[:, None], build_cov_matrix(s, config.noise), y)
        return float(beta[0])
    data = RegressionDataset(s, covariate[:, None], y)
    return float(fit_ml(data, FitConfig(free=config.fit_free)).beta_hat[0])


def _task(args):
    config, replicate, n = args
    s, x, shat_x, y = simulate_timeseries(config, replicate, n)
    out = []
    for covariate in (x, shat_x):
        try:
            out.append(_estimate(config, s, covariate, y))
        except (GPConfoundError, ConvergenceError, np.linalg.LinAlgError):
            out.append(None)
    return out


def run_timeseries_experiment(config: ExperimentConfig) -> ExperimentTable:
    """Average ``beta_hat`` of both models over replicates, for every ``n``."""
    if config.experiment_kind not in _KINDS:
        raise ValueError(f"not a time-series experiment: {config.experiment_kind}")
    tasks = [(config, r, n) for n in config.n_grid for r in range(config.replications)]
    results = pmap(_task, tasks, config.max_workers())
    table = ExperimentTable(title=config.experiment_kind.value)
    for n in config.n_grid:
        cell = [res for (_, _, tn), res in zip(tasks, results) if tn == n]
        for m, key in enumerate(MODEL_KEYS):
            vals = [c[m] for c in cell if c[m] is not None]
            table.rows.append(mc_row(n, key, vals, failures=len(cell) - len(vals)))
    return table
