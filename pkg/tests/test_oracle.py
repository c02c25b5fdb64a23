import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import iv

from specabs.approx import galerkin_coeffs
from specabs.exceptions import ConfigurationError
from specabs.oracle import oracle_coeffs, oracle_mnssae, oracle_mssae, oracle_sae
from specabs.polybasis import GradedBasis, legendre_eval
from specabs.problems import benchmark_field
from specabs.quadrature import gauss_legendre


def _split_projection(f, i):
    # adaptive quadrature split at the kink, independent of the closed forms
    g = lambda x: f(x) * legendre_eval(i, x)
    return (2 * i + 1) * 0.5 * (quad(g, -1, 0, limit=200)[0] + quad(g, 0, 1, limit=200)[0])


class TestSmooth:
    def test_first_coefficients(self):
        c = oracle_sae(5).coeffs
        assert c[0] == pytest.approx(math.sinh(1), abs=1e-15)
        assert c[1] == pytest.approx(3 / math.e, abs=1e-15)

    def test_bessel_closed_form(self):
        n = np.arange(61)
        ref = np.sqrt(np.pi / 2) * iv(n + 0.5, 1.0) * (2 * n + 1)
        assert np.allclose(oracle_sae(60).coeffs, ref, rtol=1e-13, atol=1e-300)

    def test_endpoint_sum(self):
        assert abs(oracle_sae(30).coeffs.sum() - math.e) < 1e-12

    def test_large_degree_finite(self):
        c = oracle_sae(500).coeffs
        assert np.all(np.isfinite(c)) and np.all(c >= 0)


class TestKinked:
    def test_first_coefficients(self):
        c = oracle_mssae(4).coeffs
        assert c[0] == 0.25 and c[1] == 0.5
        assert c[2] == pytest.approx(5 / 16, abs=1e-16)

    def test_odd_zero(self):
        c = oracle_mssae(99).coeffs
        assert np.all(c[3::2] == 0.0)

    def test_against_split_quadrature(self):
        c = oracle_mssae(20).coeffs
        f = lambda x: max(0.0, x)
        for i in range(21):
            assert c[i] == pytest.approx(_split_projection(f, i), abs=1e-12)


class TestSquareRoot:
    def test_first_coefficients(self):
        c = oracle_mnssae(3).coeffs
        assert c[0] == pytest.approx(1 / 3, abs=1e-15)
        assert c[1] == pytest.approx(3 / 5, abs=1e-15)

    def test_against_weighted_quadrature(self):
        # integral of sqrt(x) P_i(x) over [0, 1] with the algebraic weight handled exactly
        c = oracle_mnssae(20).coeffs
        for i in range(21):
            inner = quad(lambda x: legendre_eval(i, x), 0, 1, weight="alg", wvar=(0.5, 0))[0]
            assert c[i] == pytest.approx((2 * i + 1) * 0.5 * inner, abs=1e-12)

    def test_endpoint_sum(self):
        assert abs(oracle_mnssae(400).coeffs.sum() - 1.0) < 2e-2


class TestAgreementWithQuadrature:
    def test_smooth(self):
        g = galerkin_coeffs(benchmark_field("SAE1"), GradedBasis("legendre", 1, "total", 50),
                            gauss_legendre(400))
        assert np.abs(g.coeffs - oracle_sae(50).coeffs).max() < 1e-12

    @pytest.mark.parametrize("name", ["MSSAE1", "MNSSAE1"])
    def test_nonsmooth(self, name):
        g = galerkin_coeffs(benchmark_field(name), GradedBasis("legendre", 1, "total", 50),
                            gauss_legendre(400))
        assert np.abs(g.coeffs - oracle_coeffs(name, 50).coeffs).max() < 1e-8


class TestSeries:
    @pytest.mark.parametrize("name", ["SAE1", "MSSAE1", "MNSSAE1"])
    def test_finite_to_500(self, name):
        assert np.all(np.isfinite(oracle_coeffs(name, 500).coeffs))

    def test_unknown(self):
        with pytest.raises(ConfigurationError):
            oracle_coeffs("OSC_SAE", 3)

    def test_inner_products_and_evaluation(self):
        s = oracle_mssae(2)
        assert np.allclose(s.inner_products(), [0.25, 1 / 6, 1 / 16])
        assert s.degree == 2
        assert s(0.5) == pytest.approx(0.25 + 0.25 + 5 / 16 * legendre_eval(2, 0.5))
        assert s.to_coefficient_set().family == "legendre"
