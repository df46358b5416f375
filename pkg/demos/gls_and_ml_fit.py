"""Maximum-likelihood fit of a spatial regression and kriging on held-out sites."""

import numpy as np

from gpconfound import FitConfig, MaternParams, RegressionDataset, fit_ml, krig_predict
from gpconfound.regression import rmse
from gpconfound.experiments import simulate_gp, synthetic_sites

sites = synthetic_sites(300, seed=[0, 300])
truth = MaternParams(kappa=0.4, sigma=1.3, nu=1.5, nugget_var=0.05)
rng = np.random.default_rng(11)
x = rng.standard_normal(300)
y = 2.0 + 0.7 * x + simulate_gp(sites, truth, seed=[11, 1])
design = np.column_stack([np.ones(300), x])

perm = rng.permutation(300)
held, rest = np.sort(perm[:30]), np.sort(perm[30:])
train = RegressionDataset(sites[rest], design[rest], y[rest])
fit = fit_ml(train, FitConfig(free=("kappa", "sigma", "nu", "nugget")))
print("beta_hat", np.round(fit.beta_hat, 3), "se", np.round(fit.se, 3))
print("fitted", fit.cov_params)
pred = krig_predict(fit, train, sites[held], design[held])
print(f"held-out RMSE {rmse(pred, y[held]):.3f}")
