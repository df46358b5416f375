"""Generalized least squares, Gaussian likelihood, ML fitting and kriging.

All solves go through the Cholesky factor of the covariance matrix; the
inverse is never formed. Data sets may hold several replicates (e.g. years)
observed at the same sites; replicates share the regression coefficients and
the covariance parameters, and their log-likelihoods add up.
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import optimize

from .covkernel import CovMatrix, DistanceCache, MaternParams, as_locations, cross_cov
from .errors import ConvergenceError, ParameterDomainError, RankDeficiencyError, GPConfoundError

LOG_2PI = math.log(2.0 * math.pi)
Z95 = 1.96
COV_PARAM_NAMES = ("kappa", "sigma", "nu", "nugget")


@dataclass
class RegressionDataset:
    """Responses and covariates at a common set of sites.

    Attributes
    ----------
    locations : np.ndarray
        ``(n, d)`` site coordinates.
    covariates : np.ndarray
        ``(n, K)`` design shared by all replicates, or ``(R, n, K)`` with one
        design per replicate.
    responses : np.ndarray
        ``(R, n)``; a 1-d input is read as a single replicate.
    """

    locations: np.ndarray
    covariates: np.ndarray
    responses: np.ndarray

    def __post_init__(self):
        self.locations = as_locations(self.locations)
        y = np.asarray(self.responses, dtype=float)
        if y.ndim == 1:
            y = y[None, :]
        x = np.asarray(self.covariates, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        n = self.locations.shape[0]
        if y.ndim != 2 or y.shape[1] != n:
            raise ParameterDomainError(f"responses must have shape (R, {n}), got {y.shape}")
        if x.shape[-2] != n or x.ndim not in (2, 3) or (x.ndim == 3 and x.shape[0] != y.shape[0]):
            raise ParameterDomainError(f"covariates shape {x.shape} does not match {n} sites / {y.shape[0]} replicates")
        if x.shape[-1] < 1 or n <= x.shape[-1]:
            raise ParameterDomainError("need K >= 1 covariates and n > K sites")
        self.responses = y
        self.covariates = x

    @property
    def n(self) -> int:
        return self.locations.shape[0]

    @property
    def d(self) -> int:
        return self.locations.shape[1]

    @property
    def n_covariates(self) -> int:
        return self.covariates.shape[-1]

    @property
    def n_replicates(self) -> int:
        return self.responses.shape[0]

    def design(self) -> np.ndarray:
        """Covariates as an ``(R, n, K)`` array."""
        if self.covariates.ndim == 3:
            return self.covariates
        return np.broadcast_to(self.covariates, (self.n_replicates,) + self.covariates.shape)

    def subset(self, idx) -> "RegressionDataset":
        idx = np.asarray(idx)
        x = self.covariates[idx] if self.covariates.ndim == 2 else self.covariates[:, idx]
        return RegressionDataset(self.locations[idx], x, self.responses[:, idx])


@dataclass
class EstimationResult:
    """Output of :func:`fit_ml`."""

    beta_hat: np.ndarray
    se: np.ndarray
    ci95: np.ndarray
    cov_params: MaternParams
    loglik: float
    n_used: int
    n_evals: int = 1
    converged: bool = True


@dataclass(frozen=True)
class FitConfig:
    """Which covariance parameters are estimated, and optimizer settings.

    Parameters not listed in ``free`` are held at their value in ``init``.
    When ``init`` is None the heuristic starting point of
    :func:`initial_params` is used for both free and fixed parameters, with
    the nugget fixed at zero unless it is free.
    """

    free: Tuple[str, ...] = ("kappa", "sigma", "nu")
    init: Optional[MaternParams] = None
    nu_bounds: Tuple[float, float] = (0.1, 10.0)
    max_iter: int = 3000
    xatol: float = 1e-4
    fatol: float = 1e-6
    restarts: int = 1

    def __post_init__(self):
        bad = set(self.free) - set(COV_PARAM_NAMES)
        if bad:
            raise ParameterDomainError(f"unknown covariance parameters {sorted(bad)}")


def _whitened_normal_equations(x: np.ndarray, sigma: CovMatrix, y: np.ndarray):
    """Return (X^T S^-1 X, X^T S^-1 y, y^T S^-1 y) summed over replicates."""
    R, n, K = x.shape
    # one triangular solve for all replicates and columns
    rhs = np.concatenate([y.T, x.transpose(1, 0, 2).reshape(n, R * K)], axis=1)
    w = sigma.whiten(rhs)
    yw = w[:, :R]
    xw = w[:, R:].reshape(n, R, K)
    xtx = np.einsum("nrk,nrl->kl", xw, xw)
    xty = np.einsum("nrk,nr->k", xw, yw)
    yty = float(np.sum(yw * yw))
    return xtx, xty, yty


def _solve_normal(xtx: np.ndarray, xty: np.ndarray):
    evals = np.linalg.eigvalsh(xtx)
    if evals[0] <= 1e-12 * max(evals[-1], np.finfo(float).tiny):
        raise RankDeficiencyError("X^T Sigma^-1 X is singular")
    chol = np.linalg.cholesky(xtx)
    beta = np.linalg.solve(chol.T, np.linalg.solve(chol, xty))
    inv = np.linalg.inv(xtx)
    return beta, inv


def _as_design(x, y):
    y = np.asarray(y, dtype=float)
    single = y.ndim == 1
    y2 = y[None, :] if single else y
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim == 2:
        x = np.broadcast_to(x, (y2.shape[0],) + x.shape)
    return x, y2


def gls_estimate(x, sigma: CovMatrix, y):
    """GLS estimate ``(X^T S^-1 X)^-1 X^T S^-1 y`` and its standard errors.

    Parameters
    ----------
    x : array_like
        ``(n, K)`` design, or ``(R, n, K)`` per replicate.
    sigma : CovMatrix
        Covariance of the errors (factorized on demand).
    y : array_like
        ``(n,)`` or ``(R, n)`` responses.

    Returns
    -------
    beta_hat, se : np.ndarray
        Both of length K; ``se`` is the square root of the diagonal of
        ``(X^T S^-1 X)^-1``.
    """
    x, y = _as_design(x, y)
    xtx, xty, _ = _whitened_normal_equations(x, sigma, y)
    beta, inv = _solve_normal(xtx, xty)
    return beta, np.sqrt(np.diag(inv))


def _nll_from_parts(logdet, quad, n_total):
    return 0.5 * (logdet + quad + n_total * LOG_2PI)


def neg_loglik(dataset: RegressionDataset, beta, params: MaternParams) -> float:
    """Gaussian negative log-likelihood summed over replicates."""
    sigma = DistanceCache(dataset.locations).cov_matrix(params)
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    resid = dataset.responses - dataset.design() @ beta
    w = sigma.whiten(resid.T)
    R = dataset.n_replicates
    return _nll_from_parts(R * sigma.logdet(), float(np.sum(w * w)), R * dataset.n)


def profile_loglik(dataset: RegressionDataset, params: MaternParams, cache: Optional[DistanceCache] = None):
    """Negative log-likelihood with beta replaced by its GLS value.

    Returns
    -------
    (nll, beta_hat, se)
    """
    cache = cache or DistanceCache(dataset.locations)
    sigma = cache.cov_matrix(params)
    xtx, xty, yty = _whitened_normal_equations(dataset.design(), sigma, dataset.responses)
    beta, inv = _solve_normal(xtx, xty)
    quad = yty - float(xty @ beta)
    R = dataset.n_replicates
    return _nll_from_parts(R * sigma.logdet(), max(quad, 0.0), R * dataset.n), beta, np.sqrt(np.diag(inv))


def initial_params(dataset: RegressionDataset, cache: Optional[DistanceCache] = None, nugget: bool = False) -> MaternParams:
    """Standard geostatistics starting values.

    ``nu = 1``, ``kappa = 2 / median pairwise distance``, ``sigma`` = sample
    standard deviation of the OLS residuals, ``sigma_e = 0.01 sigma``.
    """
    cache = cache or DistanceCache(dataset.locations)
    x = dataset.design()
    R, n, K = x.shape
    xs = x.reshape(R * n, K)
    ys = dataset.responses.reshape(R * n)
    beta, *_ = np.linalg.lstsq(xs, ys, rcond=None)
    sd = float(np.std(ys - xs @ beta, ddof=1)) if R * n > 1 else 1.0
    sd = sd if sd > 0 else 1.0
    return MaternParams(
        kappa=2.0 / cache.median_distance() if cache.n > 1 else 1.0,
        sigma=sd,
        nu=1.0,
        nugget_var=(0.01 * sd) ** 2 if nugget else 0.0,
    )


def _to_vector(params: MaternParams):
    return {
        "kappa": math.log(params.kappa),
        "sigma": math.log(params.sigma),
        "nu": math.log(params.nu),
        "nugget": math.log(math.sqrt(params.nugget_var)) if params.nugget_var > 0 else math.log(1e-8),
    }


def _from_vector(theta, free, base: MaternParams) -> MaternParams:
    values = dict(kappa=base.kappa, sigma=base.sigma, nu=base.nu, nugget_var=base.nugget_var)
    for name, t in zip(free, theta):
        if name == "nugget":
            values["nugget_var"] = math.exp(2.0 * t)
        else:
            values[name] = math.exp(t)
    return MaternParams(**values)


def _result(dataset, params, nll, beta, se, n_evals, converged=True):
    ci = np.column_stack([beta - Z95 * se, beta + Z95 * se])
    return EstimationResult(
        beta_hat=beta,
        se=se,
        ci95=ci,
        cov_params=params,
        loglik=-nll,
        n_used=dataset.n,
        n_evals=n_evals,
        converged=converged,
    )


def fit_ml(dataset: RegressionDataset, config: FitConfig = FitConfig()) -> EstimationResult:
    """Joint maximum likelihood for the regression and Matérn parameters.

    The coefficients are profiled out by GLS at every candidate covariance,
    and the free covariance parameters are searched on the log scale with a
    Nelder-Mead simplex (``nu`` is kept inside ``config.nu_bounds``). After
    the first convergence the simplex is restarted ``config.restarts`` times
    from the best point, which guards against premature collapse.

    Raises
    ------
    ConvergenceError
        If the simplex hits ``config.max_iter`` evaluations; ``best`` holds
        the best result found.
    """
    cache = DistanceCache(dataset.locations)
    free = tuple(name for name in COV_PARAM_NAMES if name in config.free)
    base = config.init or initial_params(dataset, cache, nugget="nugget" in free)
    if "nugget" in free and base.nugget_var == 0:
        base = base.replace(nugget_var=(0.01 * base.sigma) ** 2)

    if not free:
        nll, beta, se = profile_loglik(dataset, base, cache)
        return _result(dataset, base, nll, beta, se, n_evals=1)

    evals = {"n": 0}
    best = {"nll": np.inf, "theta": None}

    def objective(theta):
        evals["n"] += 1
        try:
            params = _from_vector(theta, free, base)
            nll = profile_loglik(dataset, params, cache)[0]
        except (GPConfoundError, np.linalg.LinAlgError, FloatingPointError, OverflowError):
            return np.inf
        if not np.isfinite(nll):
            return np.inf
        if nll < best["nll"]:
            best["nll"], best["theta"] = nll, np.array(theta, copy=True)
        return nll

    start = _to_vector(base)
    theta0 = np.array([start[name] for name in free])
    lo, hi = np.log(config.nu_bounds)
    bounds = [(lo, hi) if name == "nu" else (None, None) for name in free]
    theta0 = np.clip(theta0, [b[0] if b[0] is not None else -np.inf for b in bounds],
                     [b[1] if b[1] is not None else np.inf for b in bounds])

    converged = True
    for _ in range(1 + config.restarts):
        budget = config.max_iter - evals["n"]
        if budget <= 0:
            converged = False
            break
        res = optimize.minimize(
            objective,
            theta0,
            method="Nelder-Mead",
            bounds=bounds,
            options={"maxfev": budget, "xatol": config.xatol, "fatol": config.fatol},
        )
        converged = bool(res.success)
        if best["theta"] is None:
            break
        theta0 = best["theta"]
        if not converged:
            break

    if best["theta"] is None:
        raise ConvergenceError("no finite likelihood value found", best=None)
    params = _from_vector(best["theta"], free, base)
    nll, beta, se = profile_loglik(dataset, params, cache)
    result = _result(dataset, params, nll, beta, se, evals["n"], converged)
    if not converged:
        raise ConvergenceError(f"Nelder-Mead did not converge in {config.max_iter} evaluations", best=result)
    return result


def _pred_design(pred_covariates, m, R, K):
    xp = np.asarray(pred_covariates, dtype=float)
    if xp.ndim == 1:
        xp = xp[:, None]
    if xp.ndim == 2:
        xp = np.broadcast_to(xp, (R,) + xp.shape)
    if xp.shape != (R, m, K):
        raise ParameterDomainError(f"prediction covariates have shape {xp.shape}, expected {(R, m, K)}")
    return xp


def krig_predict(fitted: EstimationResult, obs: RegressionDataset, pred_locations, pred_covariates) -> np.ndarray:
    """Conditional-mean (universal kriging plug-in) prediction.

    Returns ``X_p beta + S_po S_oo^-1 (y - X_o beta)`` for every replicate,
    as an ``(R, m)`` array.
    """
    params = fitted.cov_params
    pred = as_locations(pred_locations)
    beta = np.asarray(fitted.beta_hat, dtype=float)
    sigma = DistanceCache(obs.locations).cov_matrix(params)
    resid = obs.responses - obs.design() @ beta
    weights = sigma.solve(resid.T)
    s_po = cross_cov(pred, obs.locations, params)
    xp = _pred_design(pred_covariates, pred.shape[0], obs.n_replicates, obs.n_covariates)
    return xp @ beta + (s_po @ weights).T


def rmse(predicted, actual) -> float:
    """Root mean squared error over all replicates and prediction points."""
    diff = np.asarray(predicted, dtype=float) - np.asarray(actual, dtype=float)
    return float(np.sqrt(np.mean(diff**2)))
