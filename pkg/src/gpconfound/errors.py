"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`GPConfoundError`, so callers (and the CLI) can separate data problems
from numerical failures.
"""

import numpy as np


class GPConfoundError(Exception):
    """Base class for all package errors."""


class ParameterDomainError(GPConfoundError, ValueError):
    """A parameter lies outside its admissible domain."""


class DuplicateLocationError(GPConfoundError, ValueError):
    """Two observation locations coincide."""


class NotPositiveDefiniteError(GPConfoundError, np.linalg.LinAlgError):
    """A covariance matrix could not be factorized or has eigenvalues <= 0."""


class DegenerateDesignError(GPConfoundError, ValueError):
    """The covariate carries no information (all coefficients zero)."""


class RankDeficiencyError(GPConfoundError, np.linalg.LinAlgError):
    """The GLS normal matrix X^T Sigma^-1 X is singular."""


class ConvergenceError(GPConfoundError, RuntimeError):
    """The likelihood optimizer stopped before converging.

    The best point visited is kept in :attr:`best` so that a caller can
    still use it.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class RegimeError(GPConfoundError, ValueError):
    """A limit was requested for a parameter combination where it does not exist."""


class InputOrderError(GPConfoundError, ValueError):
    """Abscissae passed to a smoother are not strictly increasing."""


class DegenerateColumnError(GPConfoundError, ValueError):
    """A data column has zero variance and cannot be standardized."""


class ConfigError(GPConfoundError, ValueError):
    """An experiment or run configuration is malformed or inconsistent."""


class DataFormatError(GPConfoundError, ValueError):
    """An input file does not follow the expected schema."""
