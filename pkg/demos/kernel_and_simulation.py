"""Matérn covariances, fractional matrix powers and Gaussian field draws."""

import numpy as np

from gpconfound import MaternParams, build_cov_matrix, matern_cov, matrix_power
from gpconfound.experiments import simulate_gp, synthetic_sites

h = np.array([0.0, 0.5, 1.0, 2.0, 5.0])
for nu in (0.5, 1.5, 2.5):
    values = matern_cov(h, MaternParams(kappa=1.0, sigma=1.0, nu=nu))
    print(f"nu={nu}: " + " ".join(f"{v:.4f}" for v in values))

sites = synthetic_sites(200, seed=[0, 200])
params = MaternParams(kappa=0.4, sigma=1.3, nu=2.0)
cov = build_cov_matrix(sites, params)
half = matrix_power(cov, 0.5)
print("max |S^1/2 S^1/2 - S| =", np.max(np.abs(half.entries @ half.entries - cov.entries)))

fields = np.stack([simulate_gp(sites, params, seed=[1, r]) for r in range(500)])
print(f"empirical variance {fields.var(axis=0).mean():.3f} vs sigma^2 = {params.variance:.3f}")
