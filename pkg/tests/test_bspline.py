"""Basis evaluation, spline evaluation/derivatives, integrals."""

import numpy as np
import pytest
from hypothesis import given

from conftest import space_from, spaces
from oracles import central_diff
from splineqi import (
    SplineFunction,
    SplineSpace,
    basis_integral,
    eval_basis,
    eval_basis_derivative,
    eval_spline,
    make_clamped_knots,
)


def full_basis(space, x):
    vec = np.zeros(space.dimension)
    first, vals = eval_basis(space, x)
    vec[first : first + space.degree + 1] = vals
    return vec


def sample_points(space):
    """Span midpoints plus all knots: deterministic, covers every piece."""
    kv = space.knots
    t = kv.t
    m = kv.degree
    mids = [(t[k] + t[k + 1]) / 2.0 for k in range(m, m + kv.n)]
    return np.unique(np.concatenate([mids, t]))


class TestEvalBasis:
    def test_clamped_left_end(self):
        sp = space_from("uniform", m=3, n=6)
        first, vals = eval_basis(sp, 0.0)
        assert first == 0
        np.testing.assert_allclose(vals, [1, 0, 0, 0], atol=1e-15)

    def test_clamped_right_end(self):
        sp = space_from("uniform", m=3, n=6)
        first, vals = eval_basis(sp, 1.0)
        assert first == sp.dimension - sp.degree - 1
        np.testing.assert_allclose(vals, [0, 0, 0, 1], atol=1e-15)

    def test_linear_hats(self):
        kv = make_clamped_knots(0.0, 2.0, (1.0,), 1)  # knots (0,0,1,2,2)
        sp = SplineSpace.from_knots(kv)
        first, vals = eval_basis(sp, 0.5)
        assert first == 0
        np.testing.assert_allclose(vals, [0.5, 0.5], rtol=1e-15)

    def test_quadratic_at_interior_knot(self):
        kv = make_clamped_knots(0.0, 3.0, (1.0, 2.0), 2)
        sp = SplineSpace.from_knots(kv)
        first, vals = eval_basis(sp, 1.0)
        np.testing.assert_allclose(vals, [0.5, 0.5, 0.0], atol=1e-15)

    def test_outside_interval_rejected(self):
        sp = space_from("uniform", m=2, n=4)
        with pytest.raises(ValueError):
            eval_basis(sp, -0.01)
        with pytest.raises(ValueError):
            eval_basis(sp, 1.01)

    @given(spaces())
    def test_partition_of_unity_nonnegative(self, sp):
        for x in sample_points(sp):
            first, vals = eval_basis(sp, float(x))
            assert (vals >= -1e-15).all()
            assert abs(vals.sum() - 1.0) <= 1e-12
            assert 0 <= first <= sp.dimension - sp.degree - 1

    @given(spaces(m_hi=3, n_hi=8))
    def test_local_support(self, sp):
        # B_j vanishes outside [t[j], t[j+m+1]]
        t = sp.knots.t
        m = sp.degree
        for x in sample_points(sp):
            vec = full_basis(sp, float(x))
            for j in range(sp.dimension):
                if x < t[j] or x > t[j + m + 1]:
                    assert vec[j] == 0.0


class TestMarsden:
    @given(spaces())
    def test_monomial_reproduction(self, sp):
        # coefficients theta^(l) reproduce x^l for every l <= m
        for l in range(sp.degree + 1):
            f = SplineFunction(sp, sp.grid.moments[:, l])
            for x in sample_points(sp):
                ref = float(x) ** l
                assert abs(f(float(x)) - ref) <= 1e-10 * max(1.0, abs(ref))

    def test_linear_coefficients_give_identity_and_unit_slope(self):
        sp = space_from("random", m=3, n=9, seed=21)
        f = SplineFunction(sp, sp.grid.theta)
        for x in (0.05, 0.37, 0.62, 1.0):
            assert f(x) == pytest.approx(x, abs=1e-13)
            assert f(x, derivative_order=1) == pytest.approx(1.0, abs=1e-11)

    def test_quadratic_coefficients_give_square(self):
        sp = space_from("geometric", m=2, n=7, ratio=2.0, seed=0)
        f = SplineFunction(sp, sp.grid.moments[:, 2])
        for x in (0.0, 0.21, 0.5, 0.83, 1.0):
            assert f(x) == pytest.approx(x * x, abs=1e-13)
            assert f(x, derivative_order=1) == pytest.approx(2 * x, abs=1e-11)


class TestEvalSpline:
    def test_constant_coefficients(self):
        sp = space_from("random", m=4, n=6, seed=2)
        f = SplineFunction(sp, np.full(sp.dimension, 3.25))
        for x in (0.0, 0.3, 0.99):
            assert f(x) == pytest.approx(3.25, rel=1e-14)
            assert f(x, derivative_order=1) == pytest.approx(0.0, abs=1e-11)

    def test_order_above_degree_is_zero(self):
        sp = space_from("uniform", m=2, n=5)
        f = SplineFunction(sp, np.arange(sp.dimension, dtype=float))
        assert eval_spline(f, 0.4, derivative_order=3) == 0.0
        with pytest.raises(ValueError):
            eval_spline(f, 1.4, derivative_order=3)  # x still validated

    def test_negative_order_rejected(self):
        sp = space_from("uniform", m=2, n=5)
        f = SplineFunction(sp, np.ones(sp.dimension))
        with pytest.raises(ValueError):
            eval_spline(f, 0.5, derivative_order=-1)

    def test_coefficient_length_mismatch(self):
        sp = space_from("uniform", m=2, n=5)
        with pytest.raises(ValueError):
            eval_spline(SplineFunction(sp, np.ones(3)), 0.5)

    @given(spaces())
    def test_convex_hull_property(self, sp):
        rng = np.random.default_rng(sp.dimension)
        coeffs = rng.uniform(-1.0, 1.0, sp.dimension)
        f = SplineFunction(sp, coeffs)
        m = sp.degree
        for x in sample_points(sp):
            first, _ = eval_basis(sp, float(x))
            active = coeffs[first : first + m + 1]
            val = f(float(x))
            assert active.min() - 1e-12 <= val <= active.max() + 1e-12

    @given(spaces(m_lo=2, m_hi=4, n_hi=8))
    def test_derivative_matches_central_difference(self, sp):
        coeffs = np.cos(1.0 + 0.7 * np.arange(sp.dimension))
        f = SplineFunction(sp, coeffs)
        kv = sp.knots
        m = kv.degree
        for k in range(m, m + kv.n):
            x = (kv.t[k] + kv.t[k + 1]) / 2.0
            exact = f(x, derivative_order=1)
            approx = central_diff(f, x)
            assert abs(exact - approx) <= 1e-5 * max(1.0, abs(exact))

    def test_second_derivative_of_square(self):
        sp = space_from("random", m=3, n=7, seed=4)
        f = SplineFunction(sp, sp.grid.moments[:, 2])
        for x in (0.1, 0.45, 0.9):
            assert f(x, derivative_order=2) == pytest.approx(2.0, rel=1e-10)


class TestBasisDerivative:
    @given(spaces())
    def test_derivatives_sum_to_zero(self, sp):
        for x in sample_points(sp):
            _, derivs = eval_basis_derivative(sp, float(x))
            assert abs(derivs.sum()) <= 1e-10

    @given(spaces(m_hi=3, n_hi=6))
    def test_matches_spline_derivative_on_unit_vectors(self, sp):
        for x in sample_points(sp)[1:-1]:
            first, derivs = eval_basis_derivative(sp, float(x))
            for idx in range(sp.degree + 1):
                unit = np.zeros(sp.dimension)
                unit[first + idx] = 1.0
                f = SplineFunction(sp, unit)
                assert derivs[idx] == pytest.approx(
                    f(float(x), derivative_order=1), abs=1e-10 * max(1.0, abs(derivs[idx]))
                )

    def test_hat_function_slopes(self):
        kv = make_clamped_knots(0.0, 2.0, (1.0,), 1)
        sp = SplineSpace.from_knots(kv)
        _, derivs = eval_basis_derivative(sp, 0.5)
        np.testing.assert_allclose(derivs, [-1.0, 1.0], rtol=1e-15)


class TestBasisIntegral:
    def test_quadratic_interior_three_step_mean(self):
        sp = space_from("random", m=2, n=8, seed=6)
        h = sp.knots.steps
        # interior index j has support spanning steps j-2, j-1, j
        for j in range(2, sp.dimension - 2):
            expected = (h[j - 2] + h[j - 1] + h[j]) / 3.0
            assert basis_integral(sp, j) == pytest.approx(expected, rel=1e-14)

    def test_first_basis_function(self):
        sp = space_from("random", m=2, n=8, seed=6)
        assert basis_integral(sp, 0) == pytest.approx(sp.knots.steps[0] / 3.0, rel=1e-14)

    @given(spaces())
    def test_integrals_sum_to_interval_length(self, sp):
        total = sum(basis_integral(sp, j) for j in range(sp.dimension))
        length = sp.knots.b - sp.knots.a
        assert total == pytest.approx(length, rel=1e-12)

    def test_index_out_of_range(self):
        sp = space_from("uniform", m=2, n=4)
        with pytest.raises(ValueError):
            basis_integral(sp, -1)
        with pytest.raises(ValueError):
            basis_integral(sp, sp.dimension)
