"""Gaussian random field simulation and synthetic site sets."""

import numpy as np

from ..covkernel import CovMatrix, MaternParams, as_locations, build_cov_matrix, matrix_power
from ..errors import ParameterDomainError

#: Side length of the default synthetic square domain, in coordinate units.
DEFAULT_DOMAIN_SIDE = 20.0


def covariance_root(cov: CovMatrix, method: str = "cholesky") -> np.ndarray:
    """A matrix ``R`` with ``R @ R.T == cov``: lower Cholesky or symmetric square root."""
    if method == "cholesky":
        return cov.factorized().chol
    if method == "sqrt":
        return matrix_power(cov, 0.5).entries
    raise ParameterDomainError(f"unknown root method {method!r}")


def simulate_gp(locations, params: MaternParams, seed, method: str = "cholesky") -> np.ndarray:
    """One draw of a centred Matérn field (plus nugget, if any) at ``locations``.

    Returns ``R @ z`` for ``z`` standard normal from ``default_rng(seed)``
    and ``R`` the Cholesky factor (or, with ``method="sqrt"``, the symmetric
    square root) of the covariance matrix.
    """
    cov = build_cov_matrix(locations, params)
    z = np.random.default_rng(seed).standard_normal(cov.n)
    return covariance_root(cov, method) @ z


def regular_grid(n: int, lo: float = 0.0, hi: float = 10.0) -> np.ndarray:
    """``n`` equally spaced points on ``[lo, hi]``."""
    return np.linspace(lo, hi, n)


def synthetic_sites(n_sites: int = 620, seed=0, side: float = DEFAULT_DOMAIN_SIDE, jitter: float = 0.3) -> np.ndarray:
    """Quasi-uniform sites in a square: a jittered lattice with random drop-outs.

    A ``k x k`` lattice with ``k = ceil(sqrt(n_sites))`` is jittered by up to
    ``jitter`` cell widths per coordinate (keeping neighbours at least
    ``1 - 2 * jitter`` cells apart) and ``k**2 - n_sites`` random points are
    dropped.
    """
    if n_sites < 1 or not 0 <= jitter < 0.5:
        raise ParameterDomainError("need n_sites >= 1 and 0 <= jitter < 0.5")
    rng = np.random.default_rng(seed)
    k = int(np.ceil(np.sqrt(n_sites)))
    gx, gy = np.meshgrid(np.arange(k), np.arange(k))
    pts = np.column_stack([gx.ravel(), gy.ravel()]).astype(float) + 0.5
    pts += rng.uniform(-jitter, jitter, pts.shape)
    keep = np.sort(rng.permutation(k * k)[:n_sites])
    return pts[keep] * (side / k)


def field_roots(locations, params: MaternParams, nus, method: str = "sqrt"):
    """Covariance roots for several smoothness values at fixed ``kappa``, ``sigma``."""
    locs = as_locations(locations)
    return {float(nu): covariance_root(build_cov_matrix(locs, params.replace(nu=float(nu))), method) for nu in nus}
