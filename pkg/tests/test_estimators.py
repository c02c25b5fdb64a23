import math

import numpy as np
import pytest
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.linear_model import LinearRegression
from sklearn.utils.estimator_checks import parametrize_with_checks

from specabs.exceptions import ConfigurationError
from specabs.estimators import CollocationRegressor, GalerkinRegressor, OrthogonalPolynomialFeatures
from specabs.problems import benchmark_field
from specabs.quadrature import gauss_legendre, tensor_rule

# Monte-Carlo projection assumes samples spread uniformly over the box; the
# generic training-score check feeds unbounded standardized data instead.
_EXPECTED = {"check_regressors_train": "projection is not a least-squares fit"}


@parametrize_with_checks(
    [OrthogonalPolynomialFeatures(), GalerkinRegressor(degree=2), CollocationRegressor(degree=2)],
    expected_failed_checks=lambda est: _EXPECTED if isinstance(est, GalerkinRegressor) else {})
def test_sklearn_compatible(estimator, check):
    check(estimator)


class TestFeatures:
    def test_design_matrix(self):
        X = np.array([[0.5, -0.5], [0.1, 0.2]])
        Z = OrthogonalPolynomialFeatures(degree=1).fit_transform(X)
        assert np.allclose(Z, [[1, -0.5, 0.5], [1, 0.2, 0.1]])

    def test_bounds_map(self):
        feats = OrthogonalPolynomialFeatures(degree=2, family="chebyshev", bounds=(0.0, 10.0))
        Z = feats.fit_transform(np.array([[10.0], [5.0], [0.0]]))
        assert np.allclose(Z, [[1, 1, 1], [1, 0, -1], [1, -1, 1]])

    def test_per_feature_bounds(self):
        feats = OrthogonalPolynomialFeatures(degree=1, bounds=[(0.9, 1.1), (0.1, 0.2)])
        Z = feats.fit_transform(np.array([[1.1, 0.15], [0.9, 0.1]]))
        assert np.allclose(Z[:, 1:], [[0.0, 1.0], [-1.0, -1.0]])
        with pytest.raises(ConfigurationError):
            OrthogonalPolynomialFeatures(bounds=[(0, 1)] * 3).fit(np.zeros((2, 2)))

    def test_feature_names(self):
        f = OrthogonalPolynomialFeatures(degree=1).fit(np.zeros((2, 2)))
        assert list(f.get_feature_names_out()) == ["1", "P1(x1)", "P1(x0)"]

    def test_pipeline(self, rng):
        X = rng.uniform(-1, 1, (300, 2))
        y = 1 + X[:, 0] ** 2 - X[:, 0] * X[:, 1]
        model = make_pipeline(OrthogonalPolynomialFeatures(degree=2), LinearRegression())
        assert model.fit(X, y).score(X, y) == pytest.approx(1.0)


class TestGalerkinRegressor:
    def test_field(self):
        g = GalerkinRegressor(degree=20).fit_field(benchmark_field("SAE1"))
        assert g.coef_[0] == pytest.approx(math.sinh(1), abs=1e-13)
        assert g.mean_ == pytest.approx(math.sinh(1), abs=1e-13)
        assert g.variance_ == pytest.approx((math.e ** 2 - math.e ** -2) / 4 - math.sinh(1) ** 2)
        assert g.predict([[0.3]])[0] == pytest.approx(math.exp(0.3), abs=1e-13)

    def test_samples_with_rule_weights_match_field(self):
        rule = tensor_rule(gauss_legendre(12), 2)
        f = lambda p: np.exp(p[:, 0]) * np.cos(p[:, 1])
        a = GalerkinRegressor(degree=6).fit(rule.nodes, f(rule.nodes), sample_weight=rule.weights)
        b = GalerkinRegressor(degree=6, rule=rule).fit_field(f, n_features=2)
        assert np.allclose(a.coef_, b.coef_, atol=1e-14)

    def test_monte_carlo(self, rng):
        X = rng.uniform(0, 2, (40_000, 1))
        y = X[:, 0] ** 2
        g = GalerkinRegressor(degree=2, bounds=(0.0, 2.0)).fit(X, y)
        assert g.mean_ == pytest.approx(4 / 3, abs=0.03)
        assert g.score(X, y) > 0.99

    def test_sensitivity(self, rng):
        rule = tensor_rule(gauss_legendre(8), 2)
        y = rule.nodes[:, 0] + 0.1 * rule.nodes[:, 1]
        g = GalerkinRegressor(degree=2).fit(rule.nodes, y, sample_weight=rule.weights)
        s = g.sensitivity_
        assert s.sobol[(1,)] == pytest.approx(1 / 1.01)
        assert s.sobol[(1, 2)] == pytest.approx(0.0, abs=1e-14)

    def test_unfitted(self):
        with pytest.raises(NotFittedError):
            GalerkinRegressor().predict([[0.0]])


class TestCollocationRegressor:
    def test_field_matches_interpolation(self):
        c = CollocationRegressor(degree=20).fit_field(benchmark_field("SAE1"))
        assert c.mean_ == pytest.approx(math.sinh(1), abs=1e-13)
        assert c.predict(np.array([[0.1], [0.2]])) == pytest.approx(np.exp([0.1, 0.2]), abs=1e-12)

    def test_oscillator_statistics(self, oscillator_fields):
        c = CollocationRegressor(degree=8).fit_field(oscillator_fields["OSC_SAE"])
        g = GalerkinRegressor(degree=8).fit_field(oscillator_fields["OSC_SAE"])
        assert c.mean_ == pytest.approx(g.mean_, abs=1e-8)
        assert np.allclose(c.sensitivity_.total, g.sensitivity_.total, atol=1e-6)

    def test_least_squares_interpolates(self, rng):
        X = rng.uniform(-1, 1, (15, 2))
        y = np.sin(X[:, 0]) + X[:, 1]
        c = CollocationRegressor(degree=4).fit(X, y)
        assert np.allclose(c.predict(X), y, atol=1e-9)

    def test_maximal_grading(self):
        f = lambda p: p[:, 0] * p[:, 1]
        c = CollocationRegressor(degree=1, norm="maximal").fit_field(f, n_features=2)
        assert c.coefficients_[(1, 1)] == pytest.approx(1.0)
