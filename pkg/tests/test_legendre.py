import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from daesvr.errors import DegreeTooLarge, DomainError
from daesvr.legendre import (
    BasisSpec,
    gauss_quadrature,
    legendre_deriv,
    legendre_eval,
    legendre_roots,
    legendre_table,
    monomial_coefficients,
    shift_from_canonical,
    shift_to_canonical,
)


def legendre_sum(n, x):
    """Independent oracle: the explicit factorial form of P_n."""
    f = math.factorial
    terms = [
        (-1) ** v * f(2 * n - 2 * v) / (2**n * f(n - v) * f(n - 2 * v) * f(v)) * x ** (n - 2 * v)
        for v in range(n // 2 + 1)
    ]
    return math.fsum(terms)


class TestEval:
    def test_constant(self):
        assert legendre_eval(0, 0.3) == 1.0

    def test_linear(self):
        assert legendre_eval(1, 0.3) == 0.3

    def test_degree_five(self):
        # explicit-sum oracle: P_5(0.3) = 0.34538625
        assert_allclose(legendre_eval(5, 0.3), 0.34538625, rtol=1e-14)

    def test_against_explicit_sum(self):
        rng = np.random.default_rng(42)
        pts = rng.uniform(-1.0, 1.0, 100)
        for n in range(21):
            want = np.array([legendre_sum(n, x) for x in pts])
            assert_allclose(legendre_eval(n, pts), want, atol=1e-10)

    @pytest.mark.parametrize("n", range(31))
    def test_endpoints(self, n):
        assert_allclose(legendre_eval(n, 1.0), 1.0, rtol=1e-13)
        assert_allclose(legendre_eval(n, -1.0), (-1.0) ** n, rtol=1e-13)

    def test_negative_degree(self):
        with pytest.raises(DomainError):
            legendre_eval(-1, 0.0)


class TestDeriv:
    def test_first_derivative(self):
        # P_5'(x) = (315 x^4 - 210 x^2 + 15) / 8
        x = 0.3
        want = (315 * x**4 - 210 * x**2 + 15) / 8
        assert_allclose(legendre_deriv(5, x), want, rtol=1e-13)

    def test_second_derivative_quadratic(self):
        # P_2 = (3x^2 - 1)/2, so P_2'' = 3 everywhere
        assert_allclose(legendre_deriv(2, 0.7, order=2), 3.0, rtol=1e-14)

    def test_order_above_degree_vanishes(self):
        assert legendre_deriv(3, 0.2, order=4) == 0.0

    def test_matches_expansion_derivative(self):
        rng = np.random.default_rng(7)
        pts = rng.uniform(-1.0, 1.0, 20)
        for n in range(2, 13):
            c = monomial_coefficients(n)
            dc = np.polynomial.polynomial.polyder(c)
            want = np.polynomial.polynomial.polyval(pts, dc)
            assert_allclose(legendre_deriv(n, pts), want, atol=1e-10)

    def test_table_layout(self):
        t = legendre_table(4, np.array([0.1, -0.5]), order=1)
        assert t[0].shape == (4, 2)
        assert_allclose(t[0][2], legendre_eval(2, np.array([0.1, -0.5])))
        assert_allclose(t[1][3], legendre_deriv(3, np.array([0.1, -0.5])))


class TestRoots:
    def test_single(self):
        assert_allclose(legendre_roots(1), [0.0], atol=1e-15)

    def test_pair(self):
        # roots of P_2 = (3x^2-1)/2 are +-1/sqrt(3)
        r = 0.5773502691896258
        assert_allclose(legendre_roots(2), [-r, r], rtol=1e-14)

    @pytest.mark.parametrize("m", [2, 5, 10, 14, 20, 30])
    def test_residual_and_order(self, m):
        x = legendre_roots(m)
        assert np.all(np.diff(x) > 0)
        assert np.max(np.abs(legendre_eval(m, x))) <= 1e-13

    @pytest.mark.parametrize("m", range(1, 21))
    def test_interlacing(self, m):
        inner = legendre_roots(m)
        outer = legendre_roots(m + 1)
        assert np.all(outer[:-1] < inner)
        assert np.all(inner < outer[1:])


class TestQuadrature:
    def test_weights_sum_to_two(self):
        for m in (1, 2, 8, 32):
            rule = gauss_quadrature(m)
            assert_allclose(rule.weights.sum(), 2.0, atol=1e-12)

    def test_polynomial_exactness(self):
        # 5 nodes integrate degree <= 9; int_{-1}^{1} x^8 dx = 2/9
        rule = gauss_quadrature(5)
        got = rule.weights @ rule.nodes**8
        assert_allclose(got, 2.0 / 9.0, atol=1e-14)

    def test_orthogonality(self):
        rule = gauss_quadrature(32)
        vals = np.array([legendre_eval(n, rule.nodes) for n in range(13)])
        gram = (vals * rule.weights) @ vals.T
        want = np.diag([2.0 / (2 * n + 1) for n in range(13)])
        assert_allclose(gram, want, atol=1e-12)

    def test_mapped_interval(self):
        rule = gauss_quadrature(6)
        pts, w = rule.mapped(0.0, 2.0)
        assert_allclose(w @ pts**3, 4.0, atol=1e-12)


class TestMonomialCoefficients:
    def test_cubic(self):
        # P_3 = (5x^3 - 3x)/2
        assert_allclose(monomial_coefficients(3), [0.0, -1.5, 0.0, 2.5], rtol=1e-15)

    def test_matches_oracle_sum(self):
        for n in range(0, 15):
            c = monomial_coefficients(n)
            got = np.polynomial.polynomial.polyval(0.37, c)
            assert_allclose(got, legendre_sum(n, 0.37), rtol=1e-12)

    def test_degree_guard(self):
        monomial_coefficients(30)
        with pytest.raises(DegreeTooLarge):
            monomial_coefficients(31)


class TestShift:
    def test_forward(self):
        spec = BasisSpec(4, 0.0, 1.0)
        assert shift_to_canonical(0.0, spec) == -1.0
        assert shift_to_canonical(1.0, spec) == 1.0
        assert shift_to_canonical(0.5, spec) == 0.0

    def test_roundtrip(self):
        spec = BasisSpec(4, -0.5, 0.5)
        pts = np.linspace(-0.5, 0.5, 23)
        back = shift_from_canonical(shift_to_canonical(pts, spec), spec)
        assert_allclose(back, pts, atol=1e-14)

    def test_out_of_interval(self):
        spec = BasisSpec(4, 0.0, 1.0)
        with pytest.raises(DomainError):
            shift_to_canonical(1.0 + 1e-9, spec)
        with pytest.raises(DomainError):
            shift_from_canonical(-1.1, spec)

    def test_empty_interval(self):
        with pytest.raises(DomainError):
            BasisSpec(4, 1.0, 1.0)
