"""The diagonal (eigenbasis) picture of misspecified covariate smoothness.

Everything here lives in the eigenbasis ``{e_j}`` of a positive operator
``A`` with eigenvalues ``lambda_j ~ j**eta``. The error covariance is
``A**-alpha``, the data are generated with the covariate transformed by
``A_S**gamma`` (``gamma < 0`` smooths, ``gamma > 0`` roughens), and the
covariate's coefficients ``X_j = (X, e_j)`` fix its Sobolev index ``p``:
``sum lambda_j**s X_j**2`` is finite for ``s <= p`` and infinite beyond.

With eigenbasis observations ``Y_j = (Y, e_j)`` the maximum likelihood
estimator has the closed form

    beta_hat_n = sum_j lambda_j**alpha Y_j X_j / sum_j lambda_j**alpha X_j**2,

and its mean and variance are ``beta * A_n`` and ``B_n`` (see
:func:`an_bn_terms`).
"""

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DegenerateDesignError, ParameterDomainError, RegimeError

#: Offset that pins a canonical covariate just above Sobolev index ``p``.
CANONICAL_EPS = 0.01
#: Default truncation for norms and limiting expectations.
DEFAULT_TERMS = 10_000

Rule = Callable[[np.ndarray], np.ndarray]


class ObservationMode(enum.Enum):
    POINT = "point"
    EIGEN = "eigen"


class Regime(enum.Enum):
    ConvergesToTrueBeta = "ConvergesToTrueBeta"
    ConvergesToZero = "ConvergesToZero"
    DivergesSigned = "DivergesSigned"
    RandomFiniteLimit = "RandomFiniteLimit"
    Unspecified = "Unspecified"


@dataclass(frozen=True)
class LimitRegime:
    """Almost-sure limit of the ML estimator, with its value when known."""

    tag: Regime
    expected_limit: Optional[float] = None

    def __post_init__(self):
        if self.tag is Regime.DivergesSigned and self.expected_limit is not None:
            raise ParameterDomainError("a divergent regime has no finite limit")

    def __str__(self):
        return self.tag.value


def power_rule(eta: float, scale: float = 1.0) -> Rule:
    """The sequence ``j -> scale * j**eta``."""
    return lambda j: scale * np.asarray(j, dtype=float) ** eta


def canonical_coefficients(p: float, eta: float, eps: float = CANONICAL_EPS) -> Rule:
    """Covariate coefficients with Sobolev index ``p`` under ``lambda_j = j**eta``.

    Returns the rule ``X_j = j**(-(eta*p + 1 + eps) / 2)``: the series
    ``sum lambda_j**s X_j**2`` converges for ``s <= p`` and diverges for
    ``s >= p + eps/eta``. ``X_1 = 1``.
    """
    if p <= 0 or eta <= 0:
        raise ParameterDomainError("p and eta must be positive")
    expo = -(eta * p + 1.0 + eps) / 2.0
    return lambda j: np.asarray(j, dtype=float) ** expo


def _zero_rule(j):
    return np.zeros(np.shape(j))


@dataclass(frozen=True)
class SpectralModel:
    """Eigenvalue sequences, covariate coefficients and exponents.

    Rules map 1-based integer arrays ``j`` to float arrays. ``p`` is the
    covariate's Sobolev index when known; it is only used to check that a
    requested limit exists.
    """

    eta: float
    lam: Rule
    lam_s: Rule
    x_coeff: Rule
    alpha: float
    gamma: float
    beta_true: float = 1.0
    m_coeff: Rule = _zero_rule
    p: Optional[float] = None

    @classmethod
    def power_law(cls, eta: float, alpha: float, gamma: float, p: float, beta_true: float = 1.0, **kw) -> "SpectralModel":
        """Canonical model: ``lambda_j = lambda_S,j = j**eta`` and canonical ``X``."""
        return cls(
            eta=eta,
            lam=power_rule(eta),
            lam_s=power_rule(eta),
            x_coeff=canonical_coefficients(p, eta),
            alpha=alpha,
            gamma=gamma,
            beta_true=beta_true,
            p=p,
            **kw,
        )

    def terms(self, n: int):
        """``(lambda, lambda_S, X, m)`` for ``j = 1..n``."""
        if n < 1:
            raise ParameterDomainError("need at least one term")
        j = np.arange(1, n + 1)
        return (
            np.asarray(self.lam(j), dtype=float),
            np.asarray(self.lam_s(j), dtype=float),
            np.asarray(self.x_coeff(j), dtype=float),
            np.asarray(self.m_coeff(j), dtype=float),
        )


def sobolev_norm_sq(model: SpectralModel, s: float, n_terms: int = DEFAULT_TERMS) -> float:
    """Truncated ``sum_{j <= n_terms} lambda_j**s X_j**2``.

    With ``s = alpha`` this is the squared Cameron-Martin norm of the
    covariate, truncated.
    """
    lam, _, x, _ = model.terms(n_terms)
    return float(np.sum(lam**s * x**2))


def _is_zero(gamma):
    return math.isclose(gamma, 0.0, abs_tol=1e-12)


def classify_limit(p: float, alpha: float, gamma: float, obs_mode, beta: Optional[float] = None) -> LimitRegime:
    """Limit of the ML regression coefficient as observations fill the domain.

    Parameters
    ----------
    p : float
        Sobolev index of the covariate (in ``H^p`` and no smoother space).
    alpha : float
        Covariance exponent, ``C = A**-alpha``.
    gamma : float
        Exponent of the data-generating transformation ``A_S**gamma``.
    obs_mode : ObservationMode or {"point", "eigen"}
        Eigenbasis observations are classified completely. For point
        observations only the three proven cases are returned; every other
        combination is ``Unspecified``.
    beta : float, optional
        True coefficient, attached as ``expected_limit`` when the limit is
        ``beta``.
    """
    if p <= 0 or alpha <= 0:
        raise ParameterDomainError("p and alpha must be positive")
    mode = ObservationMode(obs_mode.value if isinstance(obs_mode, ObservationMode) else obs_mode)
    true_beta = LimitRegime(Regime.ConvergesToTrueBeta, beta)
    zero = LimitRegime(Regime.ConvergesToZero, 0.0)
    random_limit = LimitRegime(Regime.RandomFiniteLimit)

    if mode is ObservationMode.EIGEN:
        if p < alpha:
            if _is_zero(gamma):
                return true_beta
            return zero if gamma < 0 else LimitRegime(Regime.DivergesSigned)
        if gamma > p - alpha:
            return LimitRegime(Regime.DivergesSigned)
        return random_limit

    if p < alpha and _is_zero(gamma):
        return true_beta
    if p < alpha and 2.0 * gamma <= p - alpha:
        return zero
    if p >= 2.0 * alpha and gamma < 0 and not _is_zero(gamma):
        return random_limit
    return LimitRegime(Regime.Unspecified)


def _weighted_terms(model: SpectralModel, n: int):
    lam, lam_s, x, m = model.terms(n)
    w = lam**model.alpha
    denom = float(np.sum(w * x**2))
    if denom <= 0 or not np.any(x != 0):
        raise DegenerateDesignError(f"all covariate coefficients up to j = {n} are zero")
    return lam, lam_s, x, m, w, denom


def an_bn_terms(model: SpectralModel, n: int):
    """Bias factor ``A_n`` and variance ``B_n`` of the eigenbasis estimator.

    ``A_n = sum w_i lambda_S,i**gamma X_i**2 / sum w_i X_i**2`` and
    ``B_n = sum w_i X_i**2 / (sum w_i X_i**2)**2`` with ``w_i = lambda_i**alpha``,
    so that ``E beta_hat_n = beta * A_n`` (for ``m = 0``) and
    ``Var beta_hat_n = B_n``.
    """
    _, lam_s, x, _, w, denom = _weighted_terms(model, n)
    a_n = float(np.sum(w * lam_s**model.gamma * x**2)) / denom
    return a_n, 1.0 / denom


def eigenbasis_observations(model: SpectralModel, n: int, seed) -> np.ndarray:
    """Simulated ``Y_j = lambda_S,j**gamma X_j beta + m_j + lambda_j**(-alpha/2) xi_j``.

    The noise ``xi_1..xi_n`` is the first ``n`` standard normals of
    ``numpy.random.default_rng(seed)``, so observations for a smaller ``n``
    are a prefix of those for a larger one.
    """
    lam, lam_s, x, m = model.terms(n)
    xi = np.random.default_rng(seed).standard_normal(n)
    return lam_s**model.gamma * x * model.beta_true + m + lam ** (-model.alpha / 2.0) * xi


def eigenbasis_beta_hat(model: SpectralModel, n: int, seed) -> float:
    """Closed-form ML estimate from the first ``n`` eigenbasis observations."""
    _, _, x, _, w, denom = _weighted_terms(model, n)
    y = eigenbasis_observations(model, n, seed)
    return float(np.sum(w * y * x)) / denom


def eigenbasis_beta_path(model: SpectralModel, n_values, seed) -> np.ndarray:
    """``eigenbasis_beta_hat`` for several ``n`` sharing one noise sequence."""
    n_values = np.asarray(n_values, dtype=int)
    n_max = int(n_values.max())
    _, _, x, _, w, _ = _weighted_terms(model, n_max)
    y = eigenbasis_observations(model, n_max, seed)
    num = np.cumsum(w * y * x)
    den = np.cumsum(w * x * x)
    out = num[n_values - 1] / den[n_values - 1]
    if np.any(den[n_values - 1] <= 0):
        raise DegenerateDesignError("all covariate coefficients are zero for some requested n")
    return out


def beta_infinity_expectation(model: SpectralModel, n_terms: int = DEFAULT_TERMS) -> float:
    """Mean of the random limit ``(Y, X)_C / |X|_C**2``, truncated at ``n_terms``.

    Equals ``beta * (S X, X)_C / |X|_C**2 + (m, X)_C / |X|_C**2``.

    Raises
    ------
    RegimeError
        When ``model.p`` is known and the estimator does not have a random
        finite limit for ``(p, alpha, gamma)``. With ``gamma = 0`` the limit
        is ``beta`` itself and is always returned.
    """
    if model.p is not None and not _is_zero(model.gamma):
        regime = classify_limit(model.p, model.alpha, model.gamma, ObservationMode.EIGEN)
        if regime.tag is not Regime.RandomFiniteLimit:
            raise RegimeError(f"no random finite limit: regime is {regime.tag.value}")
    _, lam_s, x, m, w, denom = _weighted_terms(model, n_terms)
    num = model.beta_true * float(np.sum(w * lam_s**model.gamma * x**2)) + float(np.sum(w * m * x))
    return num / denom
