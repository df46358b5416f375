"""Lowess and covariance-power smoothing of a rough covariate."""

import numpy as np

from gpconfound import LowessConfig, MaternParams, cov_power_smooth, lowess
from gpconfound.experiments import regular_grid, simulate_gp

xs = regular_grid(400)
rough = simulate_gp(xs, MaternParams(kappa=1.0, sigma=1.0, nu=0.5), seed=3)
for span in (0.05, 0.1, 0.2):
    fitted = lowess(xs, rough, LowessConfig(span=span, iterations=3))
    print(f"lowess span {span}: residual sd {np.std(rough - fitted):.3f}")

params = MaternParams(kappa=1.0, sigma=1.0, nu=0.5)
for q in (0.5, 1.0, 3.0):
    sm = cov_power_smooth(rough[None, :], params, xs, q)[0]
    print(f"Sigma^{q} smoothing: mean |increment| {np.mean(np.abs(np.diff(sm))):.4f} (raw {np.mean(np.abs(np.diff(rough))):.4f})")
