"""Covariate smoothers: robust lowess and covariance-matrix powers."""

import math
from dataclasses import dataclass

import numpy as np

from .covkernel import MaternParams, build_cov_matrix, matrix_power
from .errors import InputOrderError, ParameterDomainError


@dataclass(frozen=True)
class LowessConfig:
    """Smoother span (fraction of points in each local fit) and robustness passes."""

    span: float = 2.0 / 3.0
    iterations: int = 3

    def __post_init__(self):
        if not 0 < self.span <= 1:
            raise ParameterDomainError(f"span must lie in (0, 1], got {self.span}")
        if self.iterations < 0:
            raise ParameterDomainError("iterations must be >= 0")


def _windows(xs, r):
    """Start index of the r-nearest-neighbour window of every point.

    For sorted abscissae the r nearest neighbours of x_i form a contiguous
    block; slide it right while the point leaving on the left is farther
    away than the point entering on the right.
    """
    n = xs.size
    starts = np.empty(n, dtype=int)
    lo = 0
    for i in range(n):
        while lo + r < n and xs[i] - xs[lo] > xs[lo + r] - xs[i]:
            lo += 1
        starts[i] = lo
    return starts


def _local_linear(xs, ys, idx, w):
    """Weighted local-linear fit evaluated at each centre point."""
    xw = xs[idx]
    yw = ys[idx]
    sw = w.sum(axis=1)
    safe = np.where(sw > 0, sw, 1.0)
    xbar = (w * xw).sum(axis=1) / safe
    # centre on the first window value so that constant data stay exact
    y0 = yw[:, :1]
    ybar = y0[:, 0] + (w * (yw - y0)).sum(axis=1) / safe
    dx = xw - xbar[:, None]
    sxx = (w * dx * dx).sum(axis=1)
    sxy = (w * dx * (yw - ybar[:, None])).sum(axis=1)
    span_sq = (xw[:, -1] - xw[:, 0]) ** 2
    # fall back to the weighted mean when the local design is degenerate
    ok = sxx > 1e-14 * np.maximum(sw * span_sq, np.finfo(float).tiny)
    slope = np.where(ok, sxy / np.where(ok, sxx, 1.0), 0.0)
    return ybar + slope * (xs - xbar)


def lowess(xs, ys, config: LowessConfig = LowessConfig()) -> np.ndarray:
    """Cleveland's robust locally weighted linear smoother.

    Each point gets a weighted linear fit over its ``ceil(span * n)`` nearest
    neighbours with tricube weights scaled by the distance to the farthest of
    them, followed by ``config.iterations`` bisquare reweighting passes
    based on the median absolute residual.

    Raises
    ------
    InputOrderError
        If ``xs`` is not strictly increasing.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1 or xs.size < 2:
        raise ParameterDomainError("xs and ys must be 1-d arrays of equal length >= 2")
    if np.any(np.diff(xs) <= 0):
        raise InputOrderError("xs must be strictly increasing")
    n = xs.size
    r = min(n, max(2, math.ceil(config.span * n - 1e-9)))
    starts = _windows(xs, r)
    idx = starts[:, None] + np.arange(r)[None, :]
    dist = np.abs(xs[idx] - xs[:, None])
    h = dist.max(axis=1)
    u = np.clip(dist / h[:, None], 0.0, 1.0)
    tricube = (1.0 - u**3) ** 3
    # guard the one-neighbour window: the farthest point has zero weight
    tricube = np.where(tricube > 0, tricube, 0.0)

    robust = np.ones(n)
    fitted = _local_linear(xs, ys, idx, tricube)
    scale = np.ptp(ys)
    for _ in range(config.iterations):
        resid = ys - fitted
        s = np.median(np.abs(resid))
        if s <= 1e-12 * max(scale, np.finfo(float).tiny):
            break
        b = np.clip(resid / (6.0 * s), -1.0, 1.0)
        robust = (1.0 - b**2) ** 2
        fitted = _local_linear(xs, ys, idx, tricube * robust[idx])
    return fitted


def cov_power_smooth(values, params: MaternParams, locations, q: float, rescale: bool = True) -> np.ndarray:
    """Smooth a field by a real power of its covariance matrix.

    Returns ``Sigma**q @ values``, with ``Sigma`` the Matérn covariance over
    ``locations``. With ``rescale`` the output is divided by its sample
    standard deviation (ddof 1), so that coefficients fitted on standardized
    data stay comparable. ``values`` may be ``(n,)`` or ``(R, n)``; each row
    is rescaled separately.
    """
    v = np.asarray(values, dtype=float)
    power = matrix_power(build_cov_matrix(locations, params, factorize=False), q).entries
    out = v @ power
    if rescale:
        sd = np.std(out, axis=-1, ddof=1, keepdims=True)
        out = out / sd
    return out
