"""Experiment configuration."""

import enum
import os
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

from ..covkernel import MaternParams
from ..errors import ConfigError
from ..smoothing import LowessConfig

#: Environment variable capping the number of worker processes.
WORKERS_ENV = "GPCONFOUND_MAX_WORKERS"


class ExperimentKind(enum.Enum):
    Timeseries1 = "timeseries1"
    Timeseries2 = "timeseries2"
    Timeseries3 = "timeseries3"
    Spatial = "spatial"
    Application = "application"


class NuSXMode(enum.Enum):
    EqualNu = "equal"
    NuMinusHalf = "minus_half"


@dataclass(frozen=True)
class ExperimentConfig:
    """Settings for one of the simulation studies.

    Fields irrelevant to a given ``experiment_kind`` are ignored. Use
    :meth:`default` for the published settings of each study.

    Attributes
    ----------
    generator : MaternParams
        Covariate field (time series) or error field (spatial, application).
    noise : MaternParams
        Error field added to the smoothed covariate (time series only).
    true_smoother, fit_smoother : LowessConfig
        Lowess used to generate ``S X`` and to build the smoothed covariate.
    smooth_powers : tuple of float
        Covariance powers applied to the (first, second) application variable.
    """

    experiment_kind: ExperimentKind
    n_grid: Tuple[int, ...]
    replications: int = 10
    base_seed: int = 0
    generator: MaternParams = MaternParams(1.0, 0.4, 1.0)
    noise: MaternParams = MaternParams(1.0, 0.1, 1.0)
    beta: float = 1.0
    domain: Tuple[float, float] = (0.0, 10.0)
    true_smoother: LowessConfig = LowessConfig(span=0.1, iterations=3)
    fit_smoother: LowessConfig = LowessConfig(span=0.2, iterations=3)
    nu_x_grid: Tuple[float, ...] = (0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0)
    nu_sx_mode: NuSXMode = NuSXMode.EqualNu
    root_method: str = "sqrt"
    n_sites: int = 620
    site_seed: Optional[int] = None
    smooth_powers: Tuple[float, float] = (0.5, 3.0)
    n_pred: int = 36
    fit_free: Tuple[str, ...] = ("kappa", "sigma", "nu")
    rescale_smoothed: bool = True
    workers: Optional[int] = None
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.replications < 1:
            raise ConfigError("replications must be >= 1")
        if not self.n_grid:
            raise ConfigError("n_grid must be nonempty")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ConfigError("n_grid must be strictly increasing")
        if min(self.n_grid) < 2:
            raise ConfigError("every sample size must be >= 2")

    @classmethod
    def default(cls, kind, **overrides) -> "ExperimentConfig":
        kind = ExperimentKind(kind)
        if kind in (ExperimentKind.Timeseries1, ExperimentKind.Timeseries2, ExperimentKind.Timeseries3):
            noise = MaternParams(1.0, 0.1, 1.0, nugget_var=0.01**2 if kind is ExperimentKind.Timeseries3 else 0.0)
            free = ("kappa", "sigma", "nu", "nugget") if kind is ExperimentKind.Timeseries3 else ("kappa", "sigma", "nu")
            base = cls(kind, (128, 256, 512, 1024), replications=10, noise=noise, fit_free=free)
        elif kind is ExperimentKind.Spatial:
            base = cls(kind, (50, 150, 300, 620), replications=100, generator=MaternParams(0.4, 1.3, 2.0))
        else:
            base = cls(
                kind,
                (15, 50, 100, 250, 620),
                replications=1,
                generator=MaternParams(0.4, 1.3, 2.0),
                beta=-1.0,
                fit_free=("kappa", "sigma", "nu", "nugget"),
            )
        return replace(base, **overrides)

    def with_(self, **changes) -> "ExperimentConfig":
        return replace(self, **changes)

    def max_workers(self) -> int:
        """Worker processes: explicit setting, capped by the environment variable."""
        wanted = self.workers if self.workers is not None else 1
        cap = os.environ.get(WORKERS_ENV)
        if cap:
            try:
                wanted = min(wanted, max(1, int(cap)))
            except ValueError:
                raise ConfigError(f"{WORKERS_ENV} must be an integer, got {cap!r}") from None
        return max(1, wanted)
