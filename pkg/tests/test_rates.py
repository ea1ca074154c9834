"""Cumulants, numeric conjugation and the rate functions."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from fracpoisson.errors import DomainError, NumericalError
from fracpoisson.schemas.params import FracParams
from fracpoisson.schemas.rates import RateMethod
from fracpoisson.services.rates import (
    brownian_rate,
    composition_rate,
    conjugate,
    glynn_whitt_residual,
    kappa,
    legendre,
    limit_cgf,
    poisson_conditional_rate,
    rate_A,
    rate_M,
    rate_T,
)

X_GRID = np.linspace(0.05, 5.0, 23)


class TestCumulants:
    def test_kappa_edges(self):
        assert kappa(FracParams(nu=1.0, lam=2.0), 2.0) == math.inf
        assert kappa(FracParams(nu=0.5, lam=2.0), 0.1) == math.inf
        assert kappa(FracParams(nu=0.5, lam=2.0), 0.0) == 0.0

    def test_limit_cgf_branches(self):
        p = FracParams(nu=0.5, h=1.0, lam=1.0)
        assert limit_cgf(p, -3.0) == 0.0
        assert_allclose(limit_cgf(p, 1.0), (math.e - 1.0) ** 2, rtol=1e-14)
        assert limit_cgf(p, 1000.0) == math.inf

    def test_classical_limit_cgf(self):
        p = FracParams(nu=1.0, h=2.0, lam=3.0)
        assert_allclose(limit_cgf(p, -1.0), 3.0 * math.expm1(-0.5), rtol=1e-14)


class TestConjugate:
    def test_quadratic(self):
        result = conjugate(lambda theta: 0.5 * theta * theta, 3.0)
        assert_allclose(result.value, 4.5, rtol=1e-10)
        assert_allclose(result.argmax_theta, 3.0, rtol=1e-6)
        assert result.method == RateMethod.NUMERIC_CONJUGATE

    def test_unbounded_is_infinite(self):
        result = conjugate(lambda theta: theta, 2.0)
        assert result.is_infinite
        assert result.argmax_theta is None

    def test_nan_is_reported(self):
        with pytest.raises(NumericalError):
            conjugate(lambda theta: math.nan, 1.0)

    def test_legendre_wraps_conjugate(self):
        f_star = legendre(lambda theta: math.expm1(theta))
        # sup theta x - (e^theta - 1) = x log x - x + 1
        assert_allclose(f_star(2.0).value, 2.0 * math.log(2.0) - 1.0, rtol=1e-10)


class TestClosedFormsAgainstConjugation:
    @pytest.mark.parametrize("nu", [1.0, 0.5])
    @pytest.mark.parametrize("x", X_GRID)
    def test_rate_T(self, nu, x):
        p = FracParams(nu=nu, h=1.0, lam=1.0)
        assert abs(rate_T(p, x).value - rate_T(p, x, numeric=True).value) < 1e-8

    @pytest.mark.parametrize("nu", [1.0, 0.5])
    @pytest.mark.parametrize("x", X_GRID)
    def test_rate_M(self, nu, x):
        p = FracParams(nu=nu, h=1.0, lam=1.0)
        assert abs(rate_M(p, x).value - rate_M(p, x, numeric=True).value) < 1e-8

    @pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
    def test_rate_M_general_order(self, x):
        p = FracParams(nu=0.7, h=1.0, lam=1.0)
        assert abs(rate_M(p, x).value - rate_M(p, x, numeric=True).value) < 1e-7

    @pytest.mark.parametrize("x", X_GRID)
    def test_rate_A(self, x):
        assert abs(rate_A(0.6, 1.5, x).value - rate_A(0.6, 1.5, x, numeric=True).value) < 1e-8

    def test_half_order_with_shape(self):
        p = FracParams(nu=0.5, h=2.0, lam=1.5)
        for x in (0.3, 1.0, 4.0):
            assert abs(rate_T(p, x).value - rate_T(p, x, numeric=True).value) < 1e-8


class TestRateIdentities:
    @pytest.mark.parametrize("x", X_GRID)
    def test_composition_equals_half_order_rate(self, x):
        p = FracParams(nu=0.5, h=1.0, lam=1.0)
        assert abs(composition_rate(1.0, x).value - rate_M(p, x).value) < 1e-8

    def test_composition_reference_value(self):
        expected = math.log(0.5 + 0.5 * math.sqrt(3.0)) - (0.5 * math.sqrt(3.0) - 0.5) ** 2
        result = composition_rate(1.0, 1.0)
        assert_allclose(result.value, expected, rtol=1e-12)
        assert_allclose(result.argmin_y, math.sqrt(3.0) - 1.0, rtol=1e-10)
        assert abs(result.value - 0.17793) < 1e-5

    @pytest.mark.parametrize("x", [0.0, 0.3, 1.0, 2.5])
    def test_alternative_equals_classical(self, x):
        assert abs(rate_A(1.0, 2.0, x).value - rate_M(FracParams(nu=1.0, lam=2.0), x).value) < 1e-10

    @pytest.mark.parametrize("nu,tol", [(1.0, 1e-10), (0.5, 1e-10), (0.7, 1e-8)])
    def test_time_scaling(self, nu, tol):
        """A rate-lambda clock runs lambda^(1/nu) times faster than a unit one."""
        lam = 2.0
        speed = lam ** (1.0 / nu)
        for x in (0.4, 1.0, 3.0):
            scaled = rate_M(FracParams(nu=nu, lam=lam), x).value
            unit = rate_M(FracParams(nu=nu, lam=1.0), x / speed).value
            assert abs(scaled - speed * unit) < tol * (1.0 + scaled)

    @pytest.mark.parametrize("nu,tol", [(1.0, 1e-10), (0.5, 1e-10), (0.7, 1e-8)])
    def test_holding_shape_scaling(self, nu, tol):
        """kappa is linear in h, so I_h(x) = h I_1(x / h)."""
        h = 2.5
        for x in (0.2, 1.0, 4.0):
            shaped = rate_T(FracParams(nu=nu, h=h, lam=1.3), x).value
            unit = rate_T(FracParams(nu=nu, h=1.0, lam=1.3), x / h).value
            assert abs(shaped - h * unit) < tol * (1.0 + shaped)

    def test_alternative_reference_value(self):
        assert_allclose(rate_A(0.5, 1.0, 3.0).value, 1.5 * math.log(1.5) - 0.5, rtol=1e-12)
        assert abs(rate_A(0.5, 1.0, 3.0).value - 0.108198) < 1e-6

    def test_zero_at_law_of_large_numbers(self):
        assert rate_M(FracParams(nu=1.0, h=2.0, lam=3.0), 1.5).value == pytest.approx(0.0, abs=1e-14)
        assert rate_A(0.5, 2.0, 8.0).value == pytest.approx(0.0, abs=1e-14)

    def test_heavy_tailed_holding_rate_decreases(self):
        p = FracParams(nu=0.7, h=1.0, lam=1.0)
        values = [rate_T(p, x).value for x in (0.1, 0.5, 1.0, 2.0, 5.0)]
        assert all(v > 0.0 for v in values)
        assert all(a > b for a, b in zip(values, values[1:]))


class TestShape:
    @pytest.mark.parametrize("nu", [0.3, 0.5, 0.7])
    def test_counting_rate_nondecreasing(self, nu):
        p = FracParams(nu=nu, lam=1.0)
        values = [rate_M(p, x).value for x in np.linspace(0.0, 5.0, 26)]
        assert values[0] == 0.0
        assert all(b >= a - 1e-10 for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("nu", [0.3, 0.5, 0.7, 1.0])
    def test_counting_rate_midpoint_convex(self, nu):
        p = FracParams(nu=nu, lam=1.0)
        rng = np.random.default_rng(11)
        for a, b in rng.uniform(0.0, 5.0, size=(40, 2)):
            mid = rate_M(p, 0.5 * (a + b)).value
            chord = 0.5 * (rate_M(p, a).value + rate_M(p, b).value)
            assert mid <= chord + 1e-9

    @pytest.mark.parametrize("nu", [0.3, 0.5, 0.7])
    def test_holding_rate_blows_up_at_zero(self, nu):
        p = FracParams(nu=nu, lam=1.0)
        values = [rate_T(p, x).value for x in (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)]
        assert all(a < b for a, b in zip(values, values[1:]))
        # growth is logarithmic in 1/x, so only a modest multiple of I(1)
        assert values[-1] > 5.0 * rate_T(p, 1.0).value

    @pytest.mark.parametrize("nu", [0.3, 0.5, 0.7])
    def test_holding_rate_vanishes_at_infinity(self, nu):
        p = FracParams(nu=nu, lam=1.0)
        values = [rate_T(p, x).value for x in (1e2, 1e4, 1e6)]
        assert all(a > b > 0.0 for a, b in zip(values, values[1:]))
        assert values[-1] < 2e-3


class TestInfiniteStates:
    def test_negative_arguments(self):
        p = FracParams(nu=0.5, lam=1.0)
        assert rate_T(p, 0.0).is_infinite
        assert rate_T(p, -1.0, numeric=True).is_infinite
        assert rate_M(p, -0.1).is_infinite
        assert rate_A(0.5, 1.0, -1.0).is_infinite
        assert composition_rate(1.0, -1.0).is_infinite

    def test_zero_arguments(self):
        assert rate_M(FracParams(nu=0.5, lam=1.0), 0.0).value == 0.0
        assert rate_M(FracParams(nu=1.0, lam=2.0), 0.0).value == pytest.approx(2.0)
        assert composition_rate(1.0, 0.0).value == 0.0

    def test_building_blocks(self):
        assert brownian_rate(2.0) == 1.0
        assert brownian_rate(-1.0) == math.inf
        assert poisson_conditional_rate(1.0, 0.0, 0.0) == 0.0
        assert poisson_conditional_rate(1.0, 1.0, 0.0) == math.inf
        assert poisson_conditional_rate(1.0, 2.0, 2.0) == pytest.approx(0.0, abs=1e-15)

    def test_rate_A_domain(self):
        with pytest.raises(DomainError):
            rate_A(1.5, 1.0, 1.0)


class TestInversionIdentities:
    @pytest.mark.parametrize("nu,thetas", [(1.0, [-2.0, -0.5, 0.3, 2.0]), (0.5, [0.0, 0.4, 1.5]), (0.8, [0.2, 1.0])])
    def test_lambda_identity(self, nu, thetas):
        p = FracParams(nu=nu, h=1.5, lam=1.2)
        for theta in thetas:
            assert glynn_whitt_residual(p, theta, "lambda") < 1e-10 * (1.0 + abs(theta))

    @pytest.mark.parametrize("nu", [0.5, 0.8, 1.0])
    @pytest.mark.parametrize("theta", np.linspace(0.0, 3.0, 13))
    def test_lambda_identity_on_grid(self, nu, theta):
        assert glynn_whitt_residual(FracParams(nu=nu, h=1.0, lam=1.0), theta, "lambda") < 1e-10

    @pytest.mark.parametrize("nu,thetas", [(1.0, [-3.0, 0.0, 1.0]), (0.5, [-2.0, -0.1, 0.0]), (0.8, [-1.0])])
    def test_kappa_identity(self, nu, thetas):
        p = FracParams(nu=nu, h=1.5, lam=1.2)
        for theta in thetas:
            assert glynn_whitt_residual(p, theta, "kappa") < 1e-10 * (1.0 + abs(theta))

    def test_domains(self):
        with pytest.raises(DomainError):
            glynn_whitt_residual(FracParams(nu=0.5, lam=1.0), -1.0, "lambda")
        with pytest.raises(DomainError):
            glynn_whitt_residual(FracParams(nu=0.5, lam=1.0), 0.5, "kappa")
        with pytest.raises(DomainError):
            glynn_whitt_residual(FracParams(nu=1.0, lam=1.0), 1.0, "kappa")
