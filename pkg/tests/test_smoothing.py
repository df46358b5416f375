import numpy as np
import pytest

from gpconfound.covkernel import MaternParams
from gpconfound.errors import InputOrderError, ParameterDomainError
from gpconfound.smoothing import LowessConfig, cov_power_smooth, lowess


def wls_oracle(xs, ys):
    """Global tricube-weighted local-linear fit at every point (span = 1)."""
    out = np.empty_like(ys)
    for i, x0 in enumerate(xs):
        d = np.abs(xs - x0)
        w = (1 - (d / d.max()) ** 3) ** 3
        a = np.column_stack([np.ones_like(xs), xs - x0]) * np.sqrt(w)[:, None]
        coef = np.linalg.lstsq(a, ys * np.sqrt(w), rcond=None)[0]
        out[i] = coef[0]
    return out


class TestLowessConfig:
    @pytest.mark.parametrize("span", [0.0, -0.1, 1.5])
    def test_span_domain(self, span):
        with pytest.raises(ParameterDomainError):
            LowessConfig(span=span)

    def test_iterations_domain(self):
        with pytest.raises(ParameterDomainError):
            LowessConfig(iterations=-1)


class TestLowess:
    @pytest.mark.parametrize("span", [0.05, 0.1, 0.3, 1.0])
    @pytest.mark.parametrize("iterations", [0, 3])
    def test_reproduces_linear(self, rng, span, iterations):
        xs = np.sort(rng.uniform(0, 10, 200))
        ys = 3.0 - 0.7 * xs
        np.testing.assert_allclose(lowess(xs, ys, LowessConfig(span, iterations)), ys, atol=1e-10)

    def test_constant(self):
        xs = np.linspace(0, 1, 50)
        out = lowess(xs, np.full(50, 2.5), LowessConfig(0.2))
        assert np.all(out == 2.5)

    def test_global_fit_matches_wls(self, rng):
        xs = np.sort(rng.uniform(0, 10, 40))
        ys = np.sin(xs) + 0.1 * rng.standard_normal(40)
        np.testing.assert_allclose(lowess(xs, ys, LowessConfig(1.0, 0)), wls_oracle(xs, ys), rtol=1e-9, atol=1e-12)

    def test_affine_equivariance(self, rng):
        xs = np.linspace(0, 10, 120)
        ys = np.cos(xs) + 0.3 * rng.standard_normal(120)
        cfg = LowessConfig(0.2, 3)
        base = lowess(xs, ys, cfg)
        np.testing.assert_allclose(lowess(xs, -2.0 * ys + 5.0, cfg), -2.0 * base + 5.0, atol=1e-9)

    def test_robust_to_outlier(self):
        xs = np.linspace(0, 10, 101)
        ys = 0.5 * xs + 0.01 * np.random.default_rng(0).standard_normal(101)
        ys[50] += 100.0
        plain = lowess(xs, ys, LowessConfig(0.2, 0))
        robust = lowess(xs, ys, LowessConfig(0.2, 3))
        assert abs(robust[50] - 2.5) < 0.02
        assert abs(plain[50] - 2.5) > 1.0

    def test_smooths_noise(self, rng):
        xs = np.linspace(0, 10, 300)
        noise = rng.standard_normal(300)
        out = lowess(xs, noise, LowessConfig(0.1))
        assert np.sum(np.diff(out) ** 2) < 0.05 * np.sum(np.diff(noise) ** 2)

    def test_unsorted(self):
        with pytest.raises(InputOrderError):
            lowess([0.0, 2.0, 1.0], [1.0, 2.0, 3.0])

    def test_ties_rejected(self):
        with pytest.raises(InputOrderError):
            lowess([0.0, 1.0, 1.0], [1.0, 2.0, 3.0])

    def test_length_mismatch(self):
        with pytest.raises(ParameterDomainError):
            lowess([0.0, 1.0], [1.0])

    def test_two_points(self):
        np.testing.assert_allclose(lowess([0.0, 1.0], [1.0, 3.0], LowessConfig(0.1, 0)), [1.0, 3.0])


class TestCovPowerSmooth:
    params = MaternParams(0.4, 1.3, 2.0)

    @pytest.fixture
    def sites(self, rng):
        return rng.uniform(0, 20, (60, 2))

    def test_identity_power(self, rng, sites):
        v = rng.standard_normal(60)
        out = cov_power_smooth(v, self.params, sites, 0.0)
        np.testing.assert_allclose(out, v / np.std(v, ddof=1), rtol=1e-10)

    def test_semigroup(self, rng, sites):
        v = rng.standard_normal(60)
        once = cov_power_smooth(v, self.params, sites, 1.0, rescale=False)
        twice = cov_power_smooth(cov_power_smooth(v, self.params, sites, 0.5, rescale=False), self.params, sites, 0.5, rescale=False)
        np.testing.assert_allclose(twice, once, rtol=1e-7, atol=1e-7 * np.abs(once).max())

    def test_rows_rescaled(self, rng, sites):
        out = cov_power_smooth(rng.standard_normal((3, 60)), self.params, sites, 3.0)
        np.testing.assert_allclose(np.std(out, axis=1, ddof=1), 1.0, rtol=1e-12)

    def test_raises_lag_one_correlation(self):
        s = np.linspace(0, 20, 80)
        wins = 0
        for seed in range(100):
            v = np.random.default_rng(seed).standard_normal(80)
            out = cov_power_smooth(v, self.params, s, 3.0)
            wins += np.corrcoef(out[:-1], out[1:])[0, 1] > np.corrcoef(v[:-1], v[1:])[0, 1]
        assert wins >= 95

    def test_reduces_roughness(self):
        s = np.linspace(0, 20, 80)
        wins = 0
        for seed in range(100):
            v = np.random.default_rng(seed).standard_normal(80)
            v = v / np.std(v, ddof=1)
            out = cov_power_smooth(v, self.params, s, 0.5)
            wins += np.sum(np.diff(out) ** 2) <= np.sum(np.diff(v) ** 2)
        assert wins >= 95
