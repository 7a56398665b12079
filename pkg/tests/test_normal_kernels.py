import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from rosenthal3.normal_kernels import (
    GaussianAffine,
    abs_moment3,
    expect_exp,
    expect_hinge,
    partial_moment_plus,
    quad_partial_moment,
    std_normal_cdf,
    std_normal_pdf,
)

# 40-digit mpmath quadrature; regenerate with tests/oracles/compute_frozen.py
PARTIAL_MOMENTS = {
    0.0: (0.5, 0.39894228040143267794, 0.5, 0.79788456080286535588),
    -1.746: (0.95959452408021604119, 1.7623347227732456167, 4.0366309500423028879, 10.572627084320352076),
    1.0: (0.15865525393145705141, 0.083315470587686298383, 0.075339783343770753032, 0.091291157831601843734),
    -1.0: (0.84134474606854294859, 1.0833154705876862984, 1.924660216656229247, 4.0912911578316018437),
    3.0: (0.0013498980316300945267, 0.00038215431704772359565, 0.00020343508048692373971,
          0.00015400339263467597216),
    5.0: (2.8665157187919391167e-7, 5.3461655338328149539e-8, 1.9343295187553163976e-8,
          1.0206834738890479197e-8),
    8.0: (6.2209605742717841235e-16, 7.5502624119464989137e-17, 1.8075064471458499252e-17,
          6.4047324672619842548e-18),
    -8.0: (0.9999999999999993779, 8.0000000000000000755, 64.999999999999999982, 536.00000000000000001),
}


def phi_quad(t):
    density = lambda z: math.exp(-z * z / 2) / math.sqrt(2 * math.pi)
    edges = [-40.0] + [b for b in (-5.0, 0.0) if b < t] + [t]
    return math.fsum(integrate.quad(density, a, b, epsabs=0.0, epsrel=1e-13)[0]
                     for a, b in zip(edges[:-1], edges[1:]))


class TestPdfCdf:
    def test_pdf_at_zero(self):
        assert std_normal_pdf(0.0) == pytest.approx(0.3989422804014327, rel=1e-15)

    def test_pdf_value(self):
        assert std_normal_pdf(1.746) == pytest.approx(0.086882683729188408753, rel=1e-14)

    @given(st.floats(-30, 30))
    def test_pdf_even(self, t):
        assert std_normal_pdf(t) == std_normal_pdf(-t)

    def test_cdf_values(self):
        assert std_normal_cdf(0.0) == 0.5
        assert std_normal_cdf(1.746) == pytest.approx(0.95959452408021604119, rel=1e-14)
        assert 0 < std_normal_cdf(-8.0) < 1e-14

    @pytest.mark.parametrize("t", np.linspace(-8, 8, 17))
    def test_cdf_against_quadrature(self, t):
        assert abs(std_normal_cdf(t) - phi_quad(t)) <= 1e-14

    @given(st.floats(-8, 8))
    def test_cdf_symmetry(self, t):
        assert std_normal_cdf(t) + std_normal_cdf(-t) == pytest.approx(1.0, abs=1e-15)

    def test_cdf_increasing(self):
        # beyond t ~ 5 consecutive grid values round to the same double
        vals = np.array([std_normal_cdf(t) for t in np.linspace(-8, 8, 2001)])
        assert np.all(np.diff(vals) >= 0)
        assert np.all(np.diff(vals[:1626]) > 0)

    @pytest.mark.parametrize("bad", [math.inf, -math.inf, math.nan])
    def test_non_finite_rejected(self, bad):
        with pytest.raises(ValueError):
            std_normal_pdf(bad)
        with pytest.raises(ValueError):
            std_normal_cdf(bad)


class TestPartialMoments:
    @pytest.mark.parametrize("t", sorted(PARTIAL_MOMENTS))
    @pytest.mark.parametrize("k", range(4))
    def test_frozen_values(self, t, k):
        assert partial_moment_plus(t, k) == pytest.approx(PARTIAL_MOMENTS[t][k], rel=1e-13)

    def test_zero_threshold_cube(self):
        assert partial_moment_plus(0.0, 3) == pytest.approx(2 / math.sqrt(2 * math.pi), rel=1e-15)

    def test_far_tail_vanishes(self):
        assert 0.0 <= partial_moment_plus(40.0, 3) <= 1e-300

    def test_unsupported_order(self):
        with pytest.raises(ValueError):
            partial_moment_plus(0.0, 4)

    @pytest.mark.parametrize("t", np.linspace(-8, 8, 41))
    @pytest.mark.parametrize("k", range(4))
    def test_against_quadrature(self, t, k):
        q = quad_partial_moment(t, k)
        assert abs(partial_moment_plus(t, k) - q) <= 1e-10 * (1 + q)

    @pytest.mark.parametrize("t", [-6.0, -2.5, -0.3, 0.0, 0.7, 1.0, 2.0, 4.5])
    def test_cube_formula(self, t):
        # (t^2 + 2) phi(t) - (t^3 + 3t)(1 - Phi(t)) against its own quadrature
        closed = (t * t + 2) * std_normal_pdf(t) - (t ** 3 + 3 * t) * (1 - std_normal_cdf(t))
        q = quad_partial_moment(t, 3)
        assert closed == pytest.approx(q, rel=1e-9)

    @pytest.mark.parametrize("k", range(4))
    def test_strictly_decreasing(self, k):
        ts = np.linspace(-8, 8, 801)
        vals = np.array([partial_moment_plus(t, k) for t in ts])
        live = vals > 1e-12
        assert np.all(np.diff(vals[live]) < 0)

    def test_continuous_across_tail_switch(self):
        for k in range(4):
            below, above = partial_moment_plus(1.0, k), partial_moment_plus(np.nextafter(1.0, 2.0), k)
            assert above == pytest.approx(below, rel=1e-13)

    def test_cube_asymptote_left(self):
        # E(Z - t)_+^3 -> E(Z - t)^3 = -(t^3 + 3t) as t -> -inf
        for t in (-10.0, -20.0):
            assert partial_moment_plus(t, 3) == pytest.approx(-(t ** 3 + 3 * t), rel=1e-15)


class TestAbsMoment:
    def test_at_zero(self):
        assert abs_moment3(0.0) == pytest.approx(2 * math.sqrt(2 / math.pi), rel=1e-15)

    def test_at_five(self):
        assert abs_moment3(5.0) == pytest.approx(140.00000002041366948, rel=1e-14)

    @given(st.floats(-20, 20))
    def test_even(self, x):
        assert abs_moment3(x) == abs_moment3(-x)

    def test_minimum_at_zero(self):
        xs = np.linspace(-3, 3, 61)
        assert min(abs_moment3(x) for x in xs) == abs_moment3(0.0)


class TestExpectations:
    def test_hinge_cube_standard(self):
        assert expect_hinge(GaussianAffine(1, 0), 0, 3) == pytest.approx(0.79788456080286535588, rel=1e-14)

    def test_hinge_degenerate(self):
        assert expect_hinge(GaussianAffine(0, 2), 1, 3) == 1.0

    def test_hinge_fourth_power(self):
        assert expect_hinge(GaussianAffine(1, 0), 0, 4) == pytest.approx(1.5, rel=1e-10)

    def test_hinge_rejects_small_exponent(self):
        with pytest.raises(ValueError):
            expect_hinge(GaussianAffine(1, 0), 0, 2.5)

    @settings(max_examples=60, deadline=None)
    @given(st.floats(0.05, 3), st.floats(-5, 5), st.floats(-5, 5))
    def test_closed_form_matches_quadrature_path(self, scale, shift, t):
        ga = GaussianAffine(scale, shift)
        closed = expect_hinge(ga, t, 3)
        quad = expect_hinge(ga, t, 3, method="quad")
        assert closed == pytest.approx(quad, rel=1e-9, abs=1e-300)

    def test_non_integer_exponent_quadrature(self):
        # E(Z)_+^3.5 = 2^(1.75) Gamma(2.25) / (2 sqrt(pi))
        exact = 2 ** 1.75 * math.gamma(2.25) / (2 * math.sqrt(math.pi))
        assert expect_hinge(GaussianAffine(1, 0), 0, 3.5) == pytest.approx(exact, rel=1e-10)

    def test_large_shift_hinge(self):
        # E(Z + 1e6)_+^3 = 1e18 + 3e6 to double precision
        assert expect_hinge(GaussianAffine(1, 1e6), 0, 3) == pytest.approx(1e18 + 3e6, rel=1e-15)

    @pytest.mark.parametrize(
        "scale, shift, rate, expected",
        [(1, 0, 0, 1.0), (1, 0, 1, math.exp(0.5)), (2, 1, 1, 20.085536923187667741)],
    )
    def test_exp(self, scale, shift, rate, expected):
        assert expect_exp(GaussianAffine(scale, shift), rate) == pytest.approx(expected, rel=1e-14)

    def test_exp_overflow_flagged(self):
        with pytest.warns(RuntimeWarning):
            assert expect_exp(GaussianAffine(1, 1e4), 1.0) == math.inf

    def test_gaussian_affine_validation(self):
        with pytest.raises(ValueError):
            GaussianAffine(-1.0, 0.0)
        assert GaussianAffine(0.0, 3.0).degenerate
