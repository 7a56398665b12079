import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rosenthal3.bounds import (
    Constraints,
    PreconditionError,
    abs_cube_bound,
    corollary_bound,
    cube_plus_bound,
    golden_section,
    mean_plus_bound,
    mean_plus_majorant,
    optimize_corollary,
    round_sig,
    sup_ratio,
    theorem_bound,
)
from rosenthal3.function_class import F3Function
from rosenthal3.normal_kernels import partial_moment_plus

EZ3_PLUS = 0.79788456080286535588
EZ_PLUS_1746 = 10.572627084320352076


def grid_min_corollary(p, beta, lo=0.01, hi=20.0, n=20001):
    """Oracle: brute-force minimum of the corollary bound over a grid of a."""
    best_a, best = None, math.inf
    for a in np.linspace(lo, hi, n):
        v = corollary_bound(p, a, beta).value
        if v < best:
            best_a, best = a, v
    return best_a, best


class TestConstraints:
    def test_negative_beta_rejected(self):
        with pytest.raises(PreconditionError):
            Constraints(beta=-0.1)

    def test_zero_beta_flagged(self):
        assert Constraints(0.0).describe()["beta_zero_extension"] is True
        assert "beta_zero_extension" not in Constraints(0.5).describe()

    def test_variance_budget_fixed(self):
        with pytest.raises(PreconditionError):
            Constraints(0.1, variance_budget=2.0)


class TestTheoremBound:
    @pytest.mark.parametrize("x", np.linspace(-4, 4, 17))
    def test_matches_cube_plus(self, x):
        f = F3Function.hinge(1, x, 3)
        assert theorem_bound(f, 0.3).value == pytest.approx(cube_plus_bound(x, 0.3).value, abs=1e-12)

    def test_infinite_third_derivative(self):
        f = F3Function.hinge(1, 0, 3.5)
        assert theorem_bound(f, 0.2).value == math.inf

    def test_value(self):
        assert theorem_bound(F3Function.hinge(1, 0, 3), 0.1).value == pytest.approx(EZ3_PLUS + 0.1, rel=1e-14)

    def test_affine_plus_cubes(self):
        f = F3Function.affine(1.0, 2.0) + F3Function.hinge(2, -1, 3) + F3Function.hinge(0.5, 1, 3)
        expected = 1.0 + 2 * partial_moment_plus(-1, 3) + 0.5 * partial_moment_plus(1, 3) + 15 / 6 * 0.4
        assert theorem_bound(f, 0.4).value == pytest.approx(expected, rel=1e-14)


class TestCubeBounds:
    def test_cube_plus_values(self):
        assert cube_plus_bound(0.0, 0.1).value == pytest.approx(EZ3_PLUS + 0.1, rel=1e-14)
        assert abs(cube_plus_bound(40.0, 0.5).value - 0.5) <= 1e-300
        assert cube_plus_bound(-1.746, 0.0).value == pytest.approx(EZ_PLUS_1746, rel=1e-14)

    def test_abs_cube_value(self):
        c = Constraints(0.1, zero_means=True)
        assert abs_cube_bound(0.0, 0.2, c).value == pytest.approx(1.5957691216057307118 + 0.2, rel=1e-14)

    @given(st.floats(-10, 10), st.floats(0, 5))
    def test_abs_cube_symmetric(self, x, s3):
        c = Constraints(0.1, zero_means=True)
        assert abs_cube_bound(x, s3, c).value == abs_cube_bound(-x, s3, c).value

    def test_abs_cube_requires_zero_means(self):
        with pytest.raises(PreconditionError):
            abs_cube_bound(0.0, 0.2, Constraints(0.1))


class TestSupRatio:
    @pytest.mark.parametrize(
        "p, a, expected",
        [(1, 1.746, 0.04859680846292036786), (2, 0.639, 0.23184373732104561526), (1.5, 1.0, 0.125)],
    )
    def test_values(self, p, a, expected):
        assert sup_ratio(p, a) == pytest.approx(expected, rel=1e-14)

    @pytest.mark.parametrize("p, a", [(0, 1), (3, 1), (-1, 1), (1, 0), (1, -2)])
    def test_range(self, p, a):
        with pytest.raises(PreconditionError):
            sup_ratio(p, a)

    @settings(max_examples=200)
    @given(st.floats(0.05, 2.95), st.floats(0.01, 100), st.floats(0, 1e4))
    def test_dominates_ratio(self, p, a, u):
        assert u ** p / (u + a) ** 3 <= sup_ratio(p, a) * (1 + 1e-12)

    @given(st.floats(0.05, 2.95), st.floats(0.01, 100))
    def test_attained(self, p, a):
        u = p * a / (3 - p)
        assert u ** p / (u + a) ** 3 == pytest.approx(sup_ratio(p, a), rel=1e-12)

    def test_log_grid(self):
        rng = np.random.default_rng(7)
        grid = np.concatenate(([0.0], np.logspace(-4, 4, 10 ** 5)))
        for _ in range(10):
            p, a = rng.uniform(0.1, 2.9), 10 ** rng.uniform(-2, 2)
            best = np.max(grid ** p / (grid + a) ** 3)
            assert sup_ratio(p, a) == pytest.approx(best, rel=1e-6)


class TestCorollary:
    def test_first_constant(self):
        r = corollary_bound(1, 1.746, 0.0)
        assert r.value == pytest.approx(0.51379593336660037944, rel=1e-13)
        assert round_sig(r.value) == 0.514
        assert round_sig(r.parameters["beta_coefficient"]) == 0.0486

    def test_second_constant(self):
        r = corollary_bound(2, 0.639, 0.0)
        assert r.value == pytest.approx(0.55455623591013473997, rel=1e-13)
        assert round_sig(r.value) == 0.555
        assert round_sig(r.parameters["beta_coefficient"]) == 0.232

    def test_unit_beta(self):
        r = corollary_bound(1, 1.746, 1.0)
        assert r.value == pytest.approx(0.51379593336660037944 + 0.04859680846292036786, rel=1e-13)

    @pytest.mark.parametrize("p, a", [(0.5, 2.0), (1, 1.746), (2, 0.639), (2.7, 0.2)])
    def test_linear_in_beta(self, p, a):
        v0, v1, v2 = (corollary_bound(p, a, b).value for b in (0.0, 1.0, 2.0))
        assert v1 - v0 == pytest.approx(sup_ratio(p, a), rel=1e-12)
        assert v2 - v1 == pytest.approx(v1 - v0, rel=1e-12)

    @pytest.mark.parametrize("p, a, beta", [(1, 1.746, 0.3), (2.5, 0.1, 1.0)])
    def test_identity_with_cube_plus(self, p, a, beta):
        expected = sup_ratio(p, a) * cube_plus_bound(-a, beta).value
        assert corollary_bound(p, a, beta).value == pytest.approx(expected, rel=1e-15)


class TestOptimizeCorollary:
    @pytest.mark.parametrize("p, stated_a, a_star", [(1, 1.746, 1.74621740301201), (2, 0.639, 0.638833215803936)])
    def test_beta_zero(self, p, stated_a, a_star):
        a, r = optimize_corollary(p, 0.0)
        assert abs(a - a_star) <= 1e-6
        assert r.value <= corollary_bound(p, stated_a, 0.0).value
        _, grid_best = grid_min_corollary(p, 0.0)
        assert r.value <= grid_best + 1e-15

    @pytest.mark.parametrize("p", [0.5, 1.0, 2.0, 2.5])
    def test_large_beta_moves_minimizer_right(self, p):
        a0, _ = optimize_corollary(p, 0.0)
        a1, r1 = optimize_corollary(p, 1e3)
        assert a1 > a0
        grid_a, grid_best = grid_min_corollary(p, 1e3, lo=0.01, hi=60.0, n=6001)
        assert grid_a > a0
        assert r1.value <= grid_best + 1e-9

    @pytest.mark.parametrize("p, a", [(1, 1.746), (2, 0.639)])
    @pytest.mark.parametrize("beta", [0.0, 0.05, 1.0, 10.0])
    def test_never_worse_than_fixed_choice(self, p, a, beta):
        assert optimize_corollary(p, beta)[1].value <= corollary_bound(p, a, beta).value

    def test_golden_section_quadratic(self):
        x, fx = golden_section(lambda v: (v - 0.3) ** 2 + 1, -2, 5, tol=1e-9)
        # a flat minimum is only resolvable to about sqrt(machine epsilon)
        assert x == pytest.approx(0.3, abs=1e-7)
        assert fx == pytest.approx(1.0)


class TestMeanPlus:
    def test_value_and_attainer(self):
        r = mean_plus_bound(Constraints(0.7))
        assert r.value == 0.5
        assert r.parameters["attained_by"] == {"values": [-1.0, 1.0], "probs": [0.5, 0.5]}

    def test_majorant_plugin(self):
        assert mean_plus_majorant(0.0, 1.0) == 0.5

    @pytest.mark.parametrize("u", [-3.0, 0.0, 1.0, 7.0])
    def test_pointwise_majorant(self, u):
        assert 4 * max(u, 0.0) <= u * u + 2 * u + 1

    @given(st.floats(-1e6, 1e6))
    def test_pointwise_majorant_everywhere(self, u):
        assert 4 * max(u, 0.0) <= (u * u + 2 * u + 1) * (1 + 1e-15) + 1e-12


def test_round_sig():
    assert round_sig(0.5137959) == 0.514
    assert round_sig(0.0485968) == 0.0486
    assert round_sig(0.2318437) == 0.232
