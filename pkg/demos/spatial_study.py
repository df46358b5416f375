"""Reduced spatial study: mean beta_hat against the covariate smoothness."""

from gpconfound.experiments import ExperimentConfig, run_spatial_experiment

cfg = ExperimentConfig.default(
    "spatial", n_sites=300, n_grid=(50, 150, 300), replications=20, nu_x_grid=(0.5, 1.5, 2.0, 2.5)
)
table = run_spatial_experiment(cfg)
for row in table.rows:
    print(f"n={row.n:4d} {row.key:10s} mean={row.mean_beta:7.3f} band=[{row.band_lo:.3f}, {row.band_hi:.3f}]")
