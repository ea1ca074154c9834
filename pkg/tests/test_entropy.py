"""Relative entropy between weighted-Poisson laws."""

import math

import pytest
from numpy.testing import assert_allclose

from fracpoisson.schemas.params import EntropyQuery
from fracpoisson.services.entropy import (
    entropy_rate,
    normalized_entropy_profile,
    relative_entropy_closed_form,
    relative_entropy_finite_t,
)
from fracpoisson.services.rates import rate_A
from fracpoisson.services.special_fn import log_ml


class TestSpecialCases:
    def test_equal_intensities(self):
        q = EntropyQuery(nu=0.5, lambda1=1.3, lambda2=1.3, t=4.0)
        assert relative_entropy_finite_t(q) == 0.0
        assert entropy_rate(q) == 0.0

    def test_degenerate_first_law(self):
        q = EntropyQuery(nu=0.6, lambda1=0.0, lambda2=2.0, t=1.0)
        assert_allclose(relative_entropy_finite_t(q), log_ml(0.6, 1.0, 2.0), rtol=1e-12)
        assert_allclose(relative_entropy_closed_form(q), log_ml(0.6, 1.0, 2.0), rtol=1e-12)

    def test_degenerate_second_law(self):
        q = EntropyQuery(nu=0.6, lambda1=1.0, lambda2=0.0, t=1.0)
        assert relative_entropy_finite_t(q) == math.inf
        assert entropy_rate(q) == math.inf

    def test_needs_finite_t(self):
        with pytest.raises(ValueError):
            relative_entropy_finite_t(EntropyQuery(nu=0.5, lambda1=1.0, lambda2=2.0))


class TestValues:
    @pytest.mark.parametrize("t", [0.5, 1.0, 7.0])
    def test_classical_poisson(self, t):
        q = EntropyQuery(nu=1.0, lambda1=2.0, lambda2=1.0, t=t)
        assert_allclose(relative_entropy_finite_t(q) / t, 2.0 * math.log(2.0) - 1.0, rtol=1e-10)

    def test_rate_reference_values(self):
        assert_allclose(entropy_rate(EntropyQuery(nu=0.5, lambda1=0.0, lambda2=3.0)), 9.0, rtol=1e-15)
        assert_allclose(
            entropy_rate(EntropyQuery(nu=0.5, lambda1=1.0, lambda2=2.0)), 3.0 - math.log(4.0), rtol=1e-14
        )

    @pytest.mark.parametrize(
        "nu,l1,l2,t", [(0.5, 1.0, 2.0, 5.0), (0.7, 2.0, 0.5, 3.0), (0.9, 1.5, 1.0, 10.0), (0.3, 0.4, 0.8, 2.0)]
    )
    def test_closed_form_matches_direct_sum(self, nu, l1, l2, t):
        q = EntropyQuery(nu=nu, lambda1=l1, lambda2=l2, t=t)
        direct = relative_entropy_finite_t(q)
        closed = relative_entropy_closed_form(q)
        assert direct > 0.0
        assert abs(direct - closed) <= 1e-9 * (1.0 + abs(closed))

    @pytest.mark.parametrize("nu", [0.5, 0.8, 1.0])
    def test_normalized_entropy_converges(self, nu):
        rows = normalized_entropy_profile(nu, 1.0, 2.0, [10.0, 20.0, 40.0, 80.0])
        gaps = [abs(row.gap) for row in rows]
        assert all(later <= earlier + 1e-10 for earlier, later in zip(gaps, gaps[1:]))
        assert gaps[-1] < 0.05
        assert all(row.kind == "exact" for row in rows)

    @pytest.mark.parametrize("nu", [0.4, 0.7, 1.0])
    @pytest.mark.parametrize("x", [0.1, 0.8, 2.5, 6.0])
    def test_alternative_rate_as_entropy_rate(self, nu, x):
        q = EntropyQuery(nu=nu, lambda1=(nu * x) ** nu, lambda2=1.7)
        assert abs(rate_A(nu, 1.7, x).value - entropy_rate(q)) < 1e-10

    @pytest.mark.parametrize("nu,l1,l2", [(0.5, 1.0, 2.0), (0.8, 2.0, 0.7), (1.0, 0.3, 1.1)])
    def test_rate_is_alternative_rate_at_the_mean(self, nu, l1, l2):
        """The entropy rate is the rate of the second law at the first law's speed."""
        q = EntropyQuery(nu=nu, lambda1=l1, lambda2=l2)
        speed = l1 ** (1.0 / nu) / nu
        assert abs(entropy_rate(q) - rate_A(nu, l2, speed).value) < 1e-10
        assert entropy_rate(q) > 0.0
