import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from trunc_range.moments import (
    central_moment,
    h_from_variance,
    h_function,
    i_g,
    mean,
    moment_about,
    variance,
)
from trunc_range.selftest import direct_moment, moment_fuzz
from trunc_range.skewing import FAMILIES, cdf, pdf
from trunc_range.truncated import TruncatedDistribution, sample, symmetric

families = pytest.mark.parametrize("g", FAMILIES, ids=str)


def normal_variance(ell):
    return 1 - 2 * ell * stats.norm.pdf(ell) / (2 * stats.norm.cdf(ell) - 1)


def cauchy_variance(ell):
    return ell / math.atan(ell) - 1


class TestKernel:
    def test_cauchy_second_order(self):
        # antiderivative: (y^2 + 1)/(2 pi) arctan y - y/(2 pi) + y^2/4
        expected = 0.5 - 1 / (2 * math.pi)
        assert i_g("cauchy", 0.0, 0.0, 1.0, 2) == pytest.approx(expected, rel=1e-13)
        assert i_g("cauchy", 0.0, 0.0, 1.0, 2) == pytest.approx(0.3408450569, abs=1e-10)

    @families
    def test_symmetric_first_order(self, g):
        assert i_g(g, 0.0, -1.0, 1.0, 1) == pytest.approx(1.0, rel=1e-14)

    @families
    def test_vanishing_width(self, g):
        for eps in (1e-3, 1e-6, 1e-9):
            assert abs(i_g(g, 0.3, 1.0 - eps, 1.0, 3)) <= 2 * eps

    def test_fractional_order(self):
        ref, _ = integrate.quad(lambda y: y**-0.5 * cdf("logistic", y + 0.2), 0, 2.0,
                                epsabs=0, epsrel=1e-13)
        assert i_g("logistic", 0.2, 0.0, 2.0, 0.5) == pytest.approx(ref, rel=1e-10)
        ref2, _ = integrate.quad(lambda y: y**1.5 * cdf("normal", y - 1), 0.5, 3.0)
        assert i_g("normal", -1.0, 0.5, 3.0, 2.5) == pytest.approx(ref2, rel=1e-10)

    def test_anchor_matches_plain_for_cancelling_terms(self):
        # int_s^t y^(p-1) [G - G(a0)] = I_G - G(a0) (t^p - s^p)/p
        g, c, s, t, p, a0 = "laplace", 0.4, -1.2, 2.0, 3, -0.8
        plain = i_g(g, c, s, t, p)
        shifted = i_g(g, c, s, t, p, anchor=a0)
        assert shifted == pytest.approx(plain - cdf(g, a0) * (t**p - s**p) / p, rel=1e-12)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            i_g("normal", 0.0, 1.0, 1.0, 2)
        with pytest.raises(ValueError):
            i_g("normal", 0.0, 0.0, 1.0, 0.0)
        with pytest.raises(ValueError):
            i_g("normal", 0.0, -1.0, 1.0, 1.5)


class TestMomentAbout:
    @families
    def test_symmetric_first_moment_vanishes(self, g):
        assert abs(moment_about(symmetric(g, 2.5), 0.0, 1)) <= 1e-12

    def test_examples(self):
        assert moment_about(symmetric("normal", 1.0), 0.0, 2) == pytest.approx(
            normal_variance(1.0), abs=1e-12)
        assert moment_about(symmetric("normal", 1.0), 0.0, 2) == pytest.approx(0.29112, abs=1e-5)
        assert moment_about(symmetric("cauchy", 1.0), 0.0, 2) == pytest.approx(
            4 / math.pi - 1, abs=1e-12)

    def test_rejects(self):
        d = symmetric("normal", 1.0)
        with pytest.raises(ValueError):
            moment_about(d, 1.0, 2)
        with pytest.raises(ValueError):
            moment_about(d, 0.0, 0)
        with pytest.raises(ValueError):
            moment_about(d, 0.0, 1.5)
        assert moment_about(d, 0.0, 2.0) == moment_about(d, 0.0, 2)

    def test_against_direct_quadrature(self):
        worst = 0.0
        for d, c, p in moment_fuzz(120, seed=99):
            ref, size = direct_moment(d, c, p)
            worst = max(worst, abs(moment_about(d, c, p) - ref) / max(abs(ref), size))
        assert worst <= 1e-8

    def test_tail_support_keeps_digits(self):
        # far in the normal tail the literal formula cancels; the anchored one does not
        d = TruncatedDistribution("normal", 8.0, 9.0)
        ref, _ = direct_moment(d, 8.5, 2)
        assert moment_about(d, 8.5, 2) == pytest.approx(ref, rel=1e-9)
        literal = moment_about(d, 8.5, 2, anchored=False)
        assert abs(literal - ref) / ref > 1e-2

    def test_anchored_matches_literal_in_bulk(self):
        d = TruncatedDistribution("student-t2", -2.0, 1.0)
        for p in (1, 2, 3, 4):
            assert moment_about(d, -0.3, p) == pytest.approx(
                moment_about(d, -0.3, p, anchored=False), rel=1e-10, abs=1e-13)

    @families
    @given(ell=st.floats(1e-2, 1e2), p=st.sampled_from([1, 3, 5]))
    @settings(max_examples=25, deadline=None)
    def test_odd_moments_vanish(self, g, ell, p):
        assert abs(moment_about(symmetric(g, ell), 0.0, p)) <= 1e-10 * ell**p


class TestMeanVariance:
    @families
    def test_symmetric_mean(self, g):
        assert abs(mean(symmetric(g, 0.9))) <= 1e-12

    def test_normal_mean_on_positive_support(self):
        d = TruncatedDistribution("normal", 0.0, 2.0)
        num, _ = integrate.quad(lambda x: x * pdf("normal", x), 0, 2, epsabs=0, epsrel=1e-13)
        ref = num / d.norm
        assert 0 < mean(d) < 2
        assert mean(d) == pytest.approx(ref, abs=1e-9)
        assert mean(d) == pytest.approx(stats.truncnorm(0, 2).mean(), abs=1e-12)

    def test_laplace_mean_monte_carlo(self):
        d = TruncatedDistribution("laplace", -1.0, 3.0)
        n = 10**7
        x = sample(d, n, seed=17)
        se = x.std(ddof=1) / math.sqrt(n)
        assert abs(mean(d) - x.mean()) <= 4 * se

    @pytest.mark.parametrize("ell", [0.5, 1.0, 2.0, 5.0])
    def test_normal_variance(self, ell):
        assert variance(symmetric("normal", ell)) == pytest.approx(normal_variance(ell), abs=1e-12)

    def test_cauchy_variance(self):
        v = variance(symmetric("cauchy", 0.5))
        assert v == pytest.approx(cauchy_variance(0.5), rel=1e-11)
        assert v == pytest.approx(0.0784052161, abs=1e-10)

    def test_asymmetric_normal_variance(self):
        ref = stats.truncnorm(-0.5, 2.5).var()
        assert variance(TruncatedDistribution("normal", -0.5, 2.5)) == pytest.approx(ref, rel=1e-11)

    def test_central_moment(self):
        d = TruncatedDistribution("normal", -0.5, 2.5)
        assert central_moment(d, 1) == pytest.approx(0.0, abs=1e-13)
        assert central_moment(d, 3) == pytest.approx(
            stats.truncnorm(-0.5, 2.5).stats(moments="s") * variance(d) ** 1.5, rel=1e-9)


class TestH:
    def test_cauchy(self):
        assert h_function("cauchy", 1.0) == pytest.approx(4 / math.pi - 1, rel=1e-13)
        for ell in (0.1, 3.0, 40.0):
            exact = 1 / (ell * math.atan(ell)) - 1 / ell**2
            assert h_function("cauchy", ell) == pytest.approx(exact, rel=1e-10)

    @families
    def test_small_limit(self, g):
        assert h_function(g, 1e-3) == pytest.approx(1 / 3, abs=1e-3)

    def test_normal_at_one(self):
        assert h_function("normal", 1.0) == pytest.approx(normal_variance(1.0), abs=1e-12)

    def test_normal_h_from_printed_variance(self):
        # H = sigma^2 / l^2 with sigma^2 = 1 - 2 l f(l)/(2 Phi(l) - 1)
        for ell in (0.5, 2.0, 4.0):
            derived = normal_variance(ell) / ell**2
            assert h_function("normal", ell) == pytest.approx(derived, rel=1e-11)

    @families
    def test_modes_agree(self, g):
        for ell in (0.05, 1.0, 30.0):
            assert h_function(g, ell, "closed") == pytest.approx(
                h_function(g, ell, "quadrature"), rel=1e-9)

    @families
    def test_matches_general_moment_route(self, g):
        for ell in np.logspace(-2, 2, 25):
            h = h_function(g, ell)
            assert abs(ell**2 * h - variance(symmetric(g, ell))) <= 1e-8 * max(1.0, ell**2 * h)
            assert h_from_variance(g, ell) == pytest.approx(h, rel=1e-7)

    def test_rejects(self):
        with pytest.raises(ValueError):
            h_function("normal", 0.0)
        with pytest.raises(ValueError):
            h_function("normal", math.inf)
        with pytest.raises(ValueError):
            h_function("normal", 1.0, mode="series")
