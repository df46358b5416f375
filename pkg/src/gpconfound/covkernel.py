"""Matérn covariance evaluation, covariance-matrix assembly and matrix powers.

The Matérn family is parameterized as

.. math::

    r(h) = \\sigma^2 \\frac{2^{1-\\nu}}{\\Gamma(\\nu)} (\\kappa h)^\\nu K_\\nu(\\kappa h),

with ``kappa`` an inverse range, so that a field on :math:`\\mathbb{R}^d`
with smoothness ``nu`` has covariance operator exponent ``nu + d/2``. The
nugget is a separate additive diagonal term and is only added when a
covariance *matrix* over a set of distinct sites is assembled.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg
from scipy.spatial.distance import cdist, pdist, squareform
from scipy.special import gammaln, kv

from .errors import DuplicateLocationError, NotPositiveDefiniteError, ParameterDomainError

#: Relative diagonal jitter tried first when a Cholesky factorization fails.
JITTER_START = 1e-10
#: Number of jitter retries, each ten times larger than the previous one.
JITTER_RETRIES = 3


@dataclass(frozen=True)
class MaternParams:
    """Matérn hyperparameters plus an optional nugget.

    Attributes
    ----------
    kappa : float
        Inverse range (1 / distance unit).
    sigma : float
        Marginal standard deviation of the smooth part.
    nu : float
        Smoothness.
    nugget_var : float
        Variance of the additive white-noise term, ``sigma_e**2``.
    """

    kappa: float
    sigma: float
    nu: float
    nugget_var: float = 0.0

    def __post_init__(self):
        for name in ("kappa", "sigma", "nu"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ParameterDomainError(f"{name} must be positive and finite, got {value!r}")
        if not np.isfinite(self.nugget_var) or self.nugget_var < 0:
            raise ParameterDomainError(f"nugget_var must be >= 0, got {self.nugget_var!r}")

    @property
    def variance(self) -> float:
        return self.sigma**2

    def replace(self, **changes) -> "MaternParams":
        values = dict(kappa=self.kappa, sigma=self.sigma, nu=self.nu, nugget_var=self.nugget_var)
        values.update(changes)
        return MaternParams(**values)


@dataclass(frozen=True)
class CovMatrix:
    """A symmetric positive definite covariance matrix and its Cholesky factor.

    ``entries`` already contains any jitter that had to be added for the
    factorization to succeed; ``jitter`` records how much.
    """

    entries: np.ndarray
    chol: Optional[np.ndarray] = None
    jitter: float = 0.0

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def factorized(self) -> "CovMatrix":
        """Return a copy that carries a Cholesky factor (jitter policy applies)."""
        if self.chol is not None:
            return self
        chol, jitter = cholesky_with_jitter(self.entries)
        entries = self.entries if jitter == 0 else self.entries + jitter * np.eye(self.n)
        return CovMatrix(entries, chol, jitter)

    def solve(self, b: np.ndarray) -> np.ndarray:
        """Solve ``entries @ x = b`` with two triangular solves."""
        L = self.factorized().chol
        z = linalg.solve_triangular(L, b, lower=True, check_finite=False)
        return linalg.solve_triangular(L.T, z, lower=False, check_finite=False)

    def whiten(self, b: np.ndarray) -> np.ndarray:
        """Return ``L^{-1} b``, so that ``b^T Sigma^{-1} b = |L^{-1} b|^2``."""
        L = self.factorized().chol
        return linalg.solve_triangular(L, b, lower=True, check_finite=False)

    def logdet(self) -> float:
        L = self.factorized().chol
        return 2.0 * float(np.sum(np.log(np.diag(L))))


def cholesky_with_jitter(a: np.ndarray, scale: Optional[float] = None):
    """Lower Cholesky factor of ``a``, adding diagonal jitter on failure.

    The first retry adds ``1e-10 * scale`` to the diagonal and each later
    retry multiplies the jitter by ten. ``scale`` defaults to the mean
    diagonal entry.

    Returns
    -------
    (L, jitter)
    """
    if scale is None:
        scale = float(np.mean(np.diag(a)))
    jitter = 0.0
    for attempt in range(JITTER_RETRIES + 1):
        try:
            if jitter == 0.0:
                return np.linalg.cholesky(a), 0.0
            return np.linalg.cholesky(a + jitter * np.eye(a.shape[0])), jitter
        except np.linalg.LinAlgError:
            jitter = JITTER_START * scale if attempt == 0 else jitter * 10.0
    raise NotPositiveDefiniteError(
        f"Cholesky failed after {JITTER_RETRIES} jitter retries (last jitter {jitter / 10:.1e})"
    )


def matern_correlation(h, kappa: float, nu: float):
    """Matérn correlation function, equal to one at ``h = 0``."""
    h = np.asarray(h, dtype=float)
    x = kappa * h
    out = np.ones_like(x)
    pos = x > 0
    if np.any(pos):
        xp = x[pos]
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            logc = (1.0 - nu) * np.log(2.0) - gammaln(nu) + nu * np.log(xp)
            vals = np.exp(logc) * kv(nu, xp)
        # (x^nu K_nu(x)) overflows only for x so small that the limit 1 is exact
        vals = np.where(np.isfinite(vals), vals, 1.0)
        out[pos] = np.minimum(vals, 1.0)
    return out


def matern_cov(h, params: MaternParams):
    """Matérn covariance at distance(s) ``h``; the nugget is not included.

    Parameters
    ----------
    h : float or array_like
        Nonnegative distances.
    params : MaternParams

    Returns
    -------
    float or np.ndarray
        Same shape as ``h``.
    """
    h_arr = np.asarray(h, dtype=float)
    if np.any(h_arr < 0) or not np.all(np.isfinite(h_arr)):
        raise ParameterDomainError("distances must be finite and nonnegative")
    out = params.variance * matern_correlation(h_arr, params.kappa, params.nu)
    if np.ndim(h) == 0:
        return float(out)
    return out


def as_locations(locations) -> np.ndarray:
    """Coerce a list of points (or a 1-d array of scalars) to an ``(n, d)`` array."""
    locs = np.asarray(locations, dtype=float)
    if locs.ndim == 1:
        locs = locs[:, None]
    if locs.ndim != 2 or locs.shape[0] < 1:
        raise ParameterDomainError(f"locations must be an (n, d) array, got shape {locs.shape}")
    return locs


def _matern_on_distances(d: np.ndarray, params: MaternParams) -> np.ndarray:
    # Regular grids produce few distinct distances; evaluate the Bessel
    # function once per distinct value.
    uniq, inverse = np.unique(d, return_inverse=True)
    return matern_cov(uniq, params)[inverse.reshape(d.shape)]


class DistanceCache:
    """Pairwise distances for a fixed site set, reused across parameter values."""

    def __init__(self, locations, check_duplicates: bool = True):
        self.locations = as_locations(locations)
        n = self.locations.shape[0]
        self.n = n
        self.condensed = pdist(self.locations) if n > 1 else np.zeros(0)
        if check_duplicates and n > 1:
            extent = float(np.max(np.ptp(self.locations, axis=0))) or 1.0
            if self.condensed.min() <= 1e-10 * extent:
                idx = int(np.argmin(self.condensed))
                i, j = _condensed_to_pair(idx, n)
                raise DuplicateLocationError(f"locations {i} and {j} coincide")
        self._uniq, self._inverse = np.unique(self.condensed, return_inverse=True)

    def cov_matrix(self, params: MaternParams, factorize: bool = True) -> CovMatrix:
        if self.n == 1:
            entries = np.array([[params.variance + params.nugget_var]])
        else:
            off = matern_cov(self._uniq, params)[self._inverse]
            entries = squareform(off)
            np.fill_diagonal(entries, params.variance + params.nugget_var)
        cov = CovMatrix(entries)
        if not factorize:
            return cov
        chol, jitter = cholesky_with_jitter(entries, scale=params.variance)
        if jitter:
            entries = entries + jitter * np.eye(self.n)
        return CovMatrix(entries, chol, jitter)

    def median_distance(self) -> float:
        return float(np.median(self.condensed)) if self.condensed.size else 1.0


def _condensed_to_pair(idx: int, n: int):
    i = 0
    while idx >= n - 1 - i:
        idx -= n - 1 - i
        i += 1
    return i, i + 1 + idx


def build_cov_matrix(locations, params: MaternParams, factorize: bool = True) -> CovMatrix:
    """Assemble the Matérn covariance matrix over distinct sites.

    ``entries[i, j] = matern_cov(|s_i - s_j|) + nugget_var * (i == j)``, with
    Euclidean distance in the given coordinate units. The Cholesky factor is
    computed under the jitter policy of :func:`cholesky_with_jitter`, with
    jitter measured relative to ``sigma**2``.

    Raises
    ------
    DuplicateLocationError
        If two sites coincide.
    NotPositiveDefiniteError
        If the factorization fails even after jitter.
    """
    return DistanceCache(locations).cov_matrix(params, factorize=factorize)


def cross_cov(a, b, params: MaternParams) -> np.ndarray:
    """Matérn cross-covariance between two site sets (no nugget)."""
    d = cdist(as_locations(a), as_locations(b))
    return _matern_on_distances(d, params)


def matrix_power(m, q: float) -> CovMatrix:
    """Real power of a symmetric positive definite matrix.

    Computed from the symmetric eigendecomposition ``m = V diag(d) V^T`` as
    ``V diag(d**q) V^T``; ``q`` may be fractional or negative.

    Raises
    ------
    NotPositiveDefiniteError
        If any eigenvalue is <= 0.
    """
    a = m.entries if isinstance(m, CovMatrix) else np.asarray(m, dtype=float)
    evals, evecs = np.linalg.eigh(a)
    if evals[0] <= 0:
        raise NotPositiveDefiniteError(f"smallest eigenvalue {evals[0]:.3e} is not positive")
    out = (evecs * evals**q) @ evecs.T
    return CovMatrix(0.5 * (out + out.T))
