"""Two-variable regression pipeline with subsampling and covariate smoothing.

Given two standardized variables observed at the same sites over several
replicates (years), each is regressed on the other (with an intercept and a
Matérn error field fitted by ML) on nested random subsamples of the sites.
The fit is then used to krige a fixed held-out set of sites from all the
remaining ones. The whole exercise is repeated with each covariate replaced
by a covariance-power smoothed version of itself.
"""

from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from ..covkernel import MaternParams, as_locations
from ..errors import ConfigError, ConvergenceError, GPConfoundError
from ..regression import FitConfig, RegressionDataset, fit_ml, krig_predict, rmse
from ..smoothing import cov_power_smooth
from .config import ExperimentConfig, ExperimentKind
from .simulate import field_roots, synthetic_sites
from .tables import ExperimentTable, TableRow


@dataclass
class MultiVariableData:
    """Several variables at common sites; each value array is ``(R, n_sites)``."""

    locations: np.ndarray
    variables: Dict[str, np.ndarray]

    def __post_init__(self):
        self.locations = as_locations(self.locations)
        n = self.locations.shape[0]
        out = {}
        for name, v in self.variables.items():
            v = np.asarray(v, dtype=float)
            if v.ndim == 1:
                v = v[None, :]
            if v.shape[1] != n:
                raise ConfigError(f"variable {name!r} has {v.shape[1]} sites, expected {n}")
            out[name] = v
        shapes = {v.shape for v in out.values()}
        if len(shapes) > 1:
            raise ConfigError(f"variables disagree in shape: {sorted(shapes)}")
        self.variables = out

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(self.variables)

    @property
    def n_sites(self) -> int:
        return self.locations.shape[0]

    @property
    def n_replicates(self) -> int:
        return next(iter(self.variables.values())).shape[0]


def standardize_rows(values: np.ndarray) -> np.ndarray:
    """Zero mean and unit sample variance (ddof 1) along the last axis."""
    from ..dataio import standardize_per_replicate

    return standardize_per_replicate(np.asarray(values, dtype=float).T).T


def synthetic_bivariate(
    sites=None,
    n_replicates: int = 24,
    beta: float = -1.0,
    nu_rough: float = 0.5,
    nu_smooth: float = 2.0,
    params: MaternParams = MaternParams(0.4, 1.3, 2.0),
    seed=0,
    names: Tuple[str, str] = ("T", "P"),
    noise_sd: float = 0.1,
) -> MultiVariableData:
    """Stand-in for a smooth/rough variable pair.

    The rough variable is a Matérn field with smoothness ``nu_rough``; the
    smooth one is ``beta`` times a smoothness-``nu_smooth`` field built from
    the same normal vector, plus an independent error field with the
    parameters ``params`` and, if ``noise_sd > 0``, white measurement
    noise. Both are standardized per replicate.
    """
    sites = synthetic_sites(seed=[0 if isinstance(seed, list) else seed, 620]) if sites is None else as_locations(sites)
    roots = field_roots(sites, params, sorted({nu_rough, nu_smooth, params.nu}), method="sqrt")
    rng = np.random.default_rng(seed)
    n = sites.shape[0]
    z = rng.standard_normal((n_replicates, n))
    z_eps = rng.standard_normal((n_replicates, n))
    rough = z @ roots[nu_rough].T
    smooth = beta * (z @ roots[nu_smooth].T) + z_eps @ roots[params.nu].T
    if noise_sd > 0:
        smooth = smooth + noise_sd * rng.standard_normal(smooth.shape)
    smooth_name, rough_name = names
    return MultiVariableData(sites, {smooth_name: standardize_rows(smooth), rough_name: standardize_rows(rough)})


def _design(cov: np.ndarray) -> np.ndarray:
    return np.stack([np.ones_like(cov), cov], axis=-1)


def _fit_and_predict(data: MultiVariableData, response, covariate, idx, held, rest, fit_config):
    locs = data.locations
    try:
        fitted = fit_ml(RegressionDataset(locs[idx], _design(covariate[:, idx]), response[:, idx]), fit_config)
    except ConvergenceError as exc:
        if exc.best is None:
            raise
        fitted = exc.best
    obs = RegressionDataset(locs[rest], _design(covariate[:, rest]), response[:, rest])
    pred = krig_predict(fitted, obs, locs[held], _design(covariate[:, held]))
    return fitted, rmse(pred, response[:, held])


def smoothing_params(data: MultiVariableData, fit_config: FitConfig) -> Dict[str, MaternParams]:
    """Matérn parameters of each variable from an intercept-only fit on all sites."""
    out = {}
    for name, values in data.variables.items():
        ones = np.ones(values.shape + (1,))
        out[name] = fit_ml(RegressionDataset(data.locations, ones, values), fit_config).cov_params
    return out


def run_application_pipeline(data: MultiVariableData, config: ExperimentConfig, smoothing=None):
    """Subsample, fit both regression directions, krige, then repeat with smoothed covariates.

    Parameters
    ----------
    data : MultiVariableData
        Exactly two variables; the first gets ``config.smooth_powers[0]``.
    config : ExperimentConfig
    smoothing : dict, optional
        Precomputed per-variable Matérn parameters for the smoothing matrices
        (otherwise fitted with :func:`smoothing_params`).

    Returns
    -------
    (unsmoothed, smoothed) : ExperimentTable
        Rows keyed ``"A~B"`` (response A, covariate B) and ``"A~SB"``.
        ``mean_beta`` is the covariate coefficient and the band its Wald
        interval; ``rmse`` is the kriging error on the held-out sites.
    """
    if config.experiment_kind is not ExperimentKind.Application:
        raise ValueError(f"not an application run: {config.experiment_kind}")
    if len(data.names) != 2:
        raise ConfigError(f"need exactly two variables, got {list(data.names)}")
    n_sites = data.n_sites
    if config.n_pred < 1 or config.n_pred >= n_sites - 3:
        raise ConfigError(f"cannot hold out {config.n_pred} of {n_sites} sites")
    if max(config.n_grid) > n_sites or min(config.n_grid) < 4:
        raise ConfigError(f"n_grid must lie in [4, {n_sites}]")

    a, b = data.names
    values = {name: standardize_rows(v) for name, v in data.variables.items()}
    data = MultiVariableData(data.locations, values)
    held = np.sort(np.random.default_rng([config.base_seed, 2]).permutation(n_sites)[: config.n_pred])
    rest = np.setdiff1d(np.arange(n_sites), held)
    order = np.random.default_rng([config.base_seed, 1]).permutation(n_sites)
    fit_config = FitConfig(free=config.fit_free)

    smoothing = smoothing or smoothing_params(data, fit_config)
    powers = dict(zip((a, b), config.smooth_powers))
    smoothed = {
        name: cov_power_smooth(values[name], smoothing[name], data.locations, powers[name], rescale=config.rescale_smoothed)
        for name in (a, b)
    }

    plain = ExperimentTable(title="unsmoothed covariates")
    smooth = ExperimentTable(title="smoothed covariates")
    pairs = ((a, b), (b, a))
    for n in config.n_grid:
        idx = np.sort(order[:n])
        for table, covs, tag in ((plain, values, ""), (smooth, smoothed, "S")):
            for resp, cov in pairs:
                key = f"{resp}~{tag}{cov}"
                try:
                    fitted, err = _fit_and_predict(data, values[resp], covs[cov], idx, held, rest, fit_config)
                except (GPConfoundError, np.linalg.LinAlgError):
                    table.rows.append(TableRow(n, key, np.nan, np.nan, np.nan, np.nan, failures=1))
                    continue
                lo, hi = fitted.ci95[1]
                table.rows.append(TableRow(n, key, float(fitted.beta_hat[1]), float(lo), float(hi), err, 0, (float(fitted.beta_hat[1]),)))
    return plain, smooth
