import numpy as np
import pytest

from gpconfound.covkernel import CovMatrix, MaternParams, build_cov_matrix
from gpconfound.errors import ConvergenceError, ParameterDomainError, RankDeficiencyError
from gpconfound.experiments.simulate import simulate_gp
from gpconfound.regression import (
    FitConfig,
    RegressionDataset,
    fit_ml,
    gls_estimate,
    initial_params,
    krig_predict,
    neg_loglik,
    profile_loglik,
    rmse,
)

LOG_2PI = np.log(2 * np.pi)


def dense_gls(x, s, y):
    si = np.linalg.inv(s)
    a = x.T @ si @ x
    return np.linalg.solve(a, x.T @ si @ y), np.sqrt(np.diag(np.linalg.inv(a)))


def random_spd(rng, n):
    a = rng.standard_normal((n, n))
    return a @ a.T + n * np.eye(n)


class TestGLS:
    def test_identity_mean(self, rng):
        y = rng.standard_normal(7)
        beta, se = gls_estimate(np.ones((7, 1)), CovMatrix(np.eye(7)), y)
        assert beta[0] == pytest.approx(y.mean(), rel=1e-12)
        assert se[0] == pytest.approx(1 / np.sqrt(7), rel=1e-12)

    def test_single_observation(self):
        beta, _ = gls_estimate(np.array([[2.0]]), CovMatrix(np.array([[3.0]])), np.array([5.0]))
        assert beta[0] == pytest.approx(2.5, rel=1e-15)

    def test_dense_oracle(self, rng):
        x = rng.standard_normal((8, 2))
        y = rng.standard_normal(8)
        s = random_spd(rng, 8)
        beta, se = gls_estimate(x, CovMatrix(s), y)
        b0, se0 = dense_gls(x, s, y)
        np.testing.assert_allclose(beta, b0, rtol=1e-9)
        np.testing.assert_allclose(se, se0, rtol=1e-9)

    def test_identity_is_ols(self, rng):
        x = rng.standard_normal((30, 3))
        y = rng.standard_normal(30)
        beta, _ = gls_estimate(x, CovMatrix(np.eye(30)), y)
        np.testing.assert_allclose(beta, np.linalg.lstsq(x, y, rcond=None)[0], rtol=1e-10)

    def test_scale_invariance(self, rng):
        x = rng.standard_normal((12, 2))
        y = rng.standard_normal(12)
        s = random_spd(rng, 12)
        b1, se1 = gls_estimate(x, CovMatrix(s), y)
        b2, se2 = gls_estimate(x, CovMatrix(7.5 * s), y)
        np.testing.assert_allclose(b2, b1, rtol=1e-10)
        np.testing.assert_allclose(se2, np.sqrt(7.5) * se1, rtol=1e-10)

    def test_replicates_stack(self, rng):
        x = rng.standard_normal((3, 6, 2))
        y = rng.standard_normal((3, 6))
        s = random_spd(rng, 6)
        beta, _ = gls_estimate(x, CovMatrix(s), y)
        big = np.kron(np.eye(3), s)
        b0, _ = dense_gls(x.reshape(18, 2), big, y.reshape(18))
        np.testing.assert_allclose(beta, b0, rtol=1e-9)

    def test_rank_deficient(self, rng):
        col = rng.standard_normal(6)
        with pytest.raises(RankDeficiencyError):
            gls_estimate(np.column_stack([col, 2 * col]), CovMatrix(np.eye(6)), rng.standard_normal(6))


class TestDataset:
    def test_shapes(self):
        ds = RegressionDataset(np.arange(5.0), np.ones(5), np.zeros(5))
        assert ds.design().shape == (1, 5, 1)
        assert ds.d == 1 and ds.n == 5 and ds.n_replicates == 1

    def test_needs_more_sites_than_covariates(self):
        with pytest.raises(ParameterDomainError):
            RegressionDataset([[0.0], [1.0]], np.ones((2, 2)), np.zeros(2))

    def test_mismatched_responses(self):
        with pytest.raises(ParameterDomainError):
            RegressionDataset(np.arange(5.0), np.ones(5), np.zeros((2, 4)))

    def test_subset(self, rng):
        ds = RegressionDataset(rng.uniform(size=(6, 2)), rng.standard_normal((2, 6, 1)), rng.standard_normal((2, 6)))
        sub = ds.subset([0, 2, 5])
        np.testing.assert_array_equal(sub.responses, ds.responses[:, [0, 2, 5]])
        np.testing.assert_array_equal(sub.covariates, ds.covariates[:, [0, 2, 5]])


class TestLikelihood:
    def test_unit_scalar(self):
        # n = 1 with K = 1 is excluded by the dataset invariant n > K; two
        # uncorrelated sites give twice the scalar value
        ds = RegressionDataset([[0.0], [1e6]], np.ones((2, 1)), np.array([0.0, 0.0]))
        nll = neg_loglik(ds, [0.0], MaternParams(1.0, 1.0, 0.5))
        assert nll == pytest.approx(2 * 0.5 * LOG_2PI, rel=1e-12)

    def test_scalar_gaussian_form(self):
        sigma, r = 1.7, 0.4
        ds = RegressionDataset([[0.0], [1e6]], np.ones((2, 1)), np.array([r, r]))
        nll = neg_loglik(ds, [0.0], MaternParams(1.0, sigma, 0.5))
        expected = 2 * 0.5 * (np.log(sigma**2) + r**2 / sigma**2 + LOG_2PI)
        assert nll == pytest.approx(expected, rel=1e-12)

    def test_dense_oracle(self, rng):
        pts = rng.uniform(0, 3, (5, 2))
        x = np.column_stack([np.ones(5), rng.standard_normal(5)])
        y = rng.standard_normal((2, 5))
        beta = np.array([0.3, -0.7])
        params = MaternParams(1.2, 0.8, 1.4, nugget_var=0.05)
        s = build_cov_matrix(pts, params, factorize=False).entries
        si = np.linalg.inv(s)
        oracle = 0.0
        for rep in y:
            r = rep - x @ beta
            oracle += 0.5 * (np.linalg.slogdet(s)[1] + r @ si @ r + 5 * LOG_2PI)
        assert neg_loglik(RegressionDataset(pts, x, y), beta, params) == pytest.approx(oracle, rel=1e-9)

    def test_profile_is_minimum_over_beta(self, rng):
        pts = rng.uniform(0, 3, (8, 1))
        x = np.column_stack([np.ones(8), rng.standard_normal(8)])
        ds = RegressionDataset(pts, x, rng.standard_normal(8))
        params = MaternParams(1.0, 1.0, 1.0)
        nll, beta, _ = profile_loglik(ds, params)
        assert nll == pytest.approx(neg_loglik(ds, beta, params), rel=1e-10)
        for delta in ([0.01, 0], [0, -0.01]):
            assert neg_loglik(ds, beta + np.array(delta), params) > nll


class TestFitML:
    def test_all_fixed_is_gls(self, rng):
        pts = np.linspace(0, 10, 40)
        truth = MaternParams(1.0, 0.4, 1.0)
        y = simulate_gp(pts, truth, seed=1) + 2.0
        ds = RegressionDataset(pts, np.ones((40, 1)), y)
        res = fit_ml(ds, FitConfig(free=(), init=truth))
        beta, se = gls_estimate(np.ones((40, 1)), build_cov_matrix(pts, truth), y)
        np.testing.assert_array_equal(res.beta_hat, beta)
        np.testing.assert_array_equal(res.se, se)
        assert res.n_evals == 1
        assert res.cov_params == truth

    def test_result_invariants(self):
        pts = np.linspace(0, 10, 60)
        y = simulate_gp(pts, MaternParams(1.0, 0.4, 1.0), seed=2)
        res = fit_ml(RegressionDataset(pts, np.ones((60, 1)), y))
        np.testing.assert_allclose(res.ci95[:, 0], res.beta_hat - 1.96 * res.se)
        np.testing.assert_allclose(res.ci95[:, 1], res.beta_hat + 1.96 * res.se)
        assert np.isfinite(res.loglik)
        assert res.n_used == 60
        assert 0.1 <= res.cov_params.nu <= 10

    def test_optimum_beats_truth(self):
        pts = np.linspace(0, 10, 80)
        truth = MaternParams(1.0, 0.4, 1.0)
        y = simulate_gp(pts, truth, seed=3)
        ds = RegressionDataset(pts, np.ones((80, 1)), y)
        res = fit_ml(ds)
        assert -res.loglik <= profile_loglik(ds, truth)[0] + 1e-6

    def test_deterministic(self):
        pts = np.linspace(0, 10, 50)
        y = simulate_gp(pts, MaternParams(1.0, 0.4, 1.0), seed=4)
        ds = RegressionDataset(pts, np.ones((50, 1)), y)
        a, b = fit_ml(ds), fit_ml(ds)
        assert a.cov_params == b.cov_params
        np.testing.assert_array_equal(a.beta_hat, b.beta_hat)

    def test_initial_params(self):
        pts = np.array([0.0, 1.0, 3.0])
        ds = RegressionDataset(pts, np.ones((3, 1)), np.array([1.0, 2.0, 6.0]))
        p = initial_params(ds, nugget=True)
        assert p.kappa == pytest.approx(1.0)  # median distance 2
        assert p.nu == 1.0
        assert p.sigma == pytest.approx(np.std([1.0, 2.0, 6.0], ddof=1))
        assert p.nugget_var == pytest.approx((0.01 * p.sigma) ** 2)

    def test_convergence_error_carries_best(self):
        pts = np.linspace(0, 10, 30)
        y = simulate_gp(pts, MaternParams(1.0, 0.4, 1.0), seed=5)
        with pytest.raises(ConvergenceError) as info:
            fit_ml(RegressionDataset(pts, np.ones((30, 1)), y), FitConfig(max_iter=5))
        assert info.value.best is not None
        assert np.isfinite(info.value.best.loglik)

    def test_unknown_free_parameter(self):
        with pytest.raises(ParameterDomainError):
            FitConfig(free=("kappa", "range"))

    @pytest.mark.slow
    def test_recovers_sigma(self):
        pts = np.linspace(0, 10, 512)
        truth = MaternParams(1.0, 0.4, 1.0)
        good = 0
        for run in range(10):
            y = np.vstack([simulate_gp(pts, truth, seed=[77, run, r]) for r in range(10)])
            res = fit_ml(RegressionDataset(pts, np.ones((512, 1)), y))
            good += abs(res.cov_params.sigma - 0.4) < 0.25 * 0.4
        assert good >= 8


class TestKriging:
    @pytest.fixture
    def setup(self, rng):
        pts = rng.uniform(0, 10, (25, 2))
        params = MaternParams(0.5, 1.0, 1.5)
        x = np.column_stack([np.ones(25), rng.standard_normal(25)])
        y = np.vstack([x @ [1.0, 2.0] + simulate_gp(pts, params, seed=s) for s in range(2)])
        fitted = fit_ml(RegressionDataset(pts, x, y), FitConfig(free=(), init=params))
        return pts, x, y, params, fitted

    def test_interpolates(self, setup):
        pts, x, y, _, fitted = setup
        obs = RegressionDataset(pts, x, y)
        pred = krig_predict(fitted, obs, pts[:4], x[:4])
        np.testing.assert_allclose(pred, y[:, :4], atol=1e-8)

    def test_far_away_is_regression_mean(self, setup):
        pts, x, y, _, fitted = setup
        far = np.array([[1e7, 1e7]])
        pred = krig_predict(fitted, RegressionDataset(pts, x, y), far, np.array([[1.0, 0.5]]))
        np.testing.assert_allclose(pred, np.full((2, 1), fitted.beta_hat @ [1.0, 0.5]), atol=1e-12)

    def test_dense_oracle(self, setup):
        pts, x, y, params, fitted = setup
        obs, new = np.arange(18), np.arange(18, 25)
        pred = krig_predict(fitted, RegressionDataset(pts[obs], x[obs], y[:, obs]), pts[new], x[new])
        s = build_cov_matrix(pts, params, factorize=False).entries
        b = fitted.beta_hat
        for r in range(2):
            resid = y[r, obs] - x[obs] @ b
            oracle = x[new] @ b + s[np.ix_(new, obs)] @ np.linalg.inv(s[np.ix_(obs, obs)]) @ resid
            np.testing.assert_allclose(pred[r], oracle, rtol=1e-8, atol=1e-10)

    def test_rmse(self):
        assert rmse([[1.0, 2.0]], [[1.0, 4.0]]) == pytest.approx(np.sqrt(2.0))
