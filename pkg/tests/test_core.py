"""Domain types, constants, and elementwise helpers."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from osaucs import (
    CONSTANTS,
    CubicSolver,
    DegenerateInput,
    LgjColor,
    SolveOptions,
    XyzColor,
    chromaticity,
    k_factor,
    signed_cbrt,
)


class TestConstants:
    def test_matrix_inverse_roundtrip(self):
        ident = CONSTANTS.M @ CONSTANTS.M_inv
        assert np.max(np.abs(ident - np.eye(3))) <= 1e-12
        ident = CONSTANTS.M_inv @ CONSTANTS.M
        assert np.max(np.abs(ident - np.eye(3))) <= 1e-12

    def test_augmented_matrix_inverse_roundtrip(self):
        ident = CONSTANTS.A_tilde @ CONSTANTS.A_tilde_inv
        assert np.max(np.abs(ident - np.eye(3))) <= 1e-12

    def test_augmented_matrix_determinant(self):
        # The augmented opponent matrix is far from singular.
        assert CONSTANTS.det_a_tilde() == pytest.approx(-139.69, rel=1e-10)

    def test_augmented_matrix_rows(self):
        # Row 0 and 1 are the opponent rows; row 2 selects the first
        # component of the cube-rooted RGB vector.
        assert np.array_equal(CONSTANTS.A_tilde[:2], CONSTANTS.A)
        assert np.array_equal(CONSTANTS.A_tilde[2], [1.0, 0.0, 0.0])

    def test_scalar_constants(self):
        assert CONSTANTS.L_offset == 14.3993
        assert CONSTANTS.L_scale == math.sqrt(2.0)
        assert CONSTANTS.lightness_divisor == 5.9
        assert CONSTANTS.lightness_shift == 2.0 / 3.0
        assert CONSTANTS.small_term == 0.042
        assert CONSTANTS.w0 == float(np.cbrt(79.9 + 41.94))

    def test_matrices_are_read_only(self):
        with pytest.raises(ValueError):
            CONSTANTS.M[0, 0] = 0.0


class TestDomainTypes:
    def test_color_tuples_unpack(self):
        c = XyzColor(1.0, 2.0, 3.0)
        X, Y, Z = c
        assert (X, Y, Z) == (1.0, 2.0, 3.0)
        d = LgjColor(4.0, 5.0, 6.0)
        assert (d.L, d.g, d.j) == (4.0, 5.0, 6.0)

    def test_solve_options_defaults(self):
        opts = SolveOptions()
        assert opts.cubic_solver is CubicSolver.CARDANO
        assert opts.newton_tol == 1e-12
        assert opts.max_iter == 100
        assert opts.fd_check is False

    def test_solve_options_validation(self):
        with pytest.raises(ValueError):
            SolveOptions(newton_tol=0.0)
        with pytest.raises(ValueError):
            SolveOptions(newton_tol=-1e-12)
        with pytest.raises(ValueError):
            SolveOptions(max_iter=0)

    def test_solver_enum_values(self):
        assert CubicSolver("cardano") is CubicSolver.CARDANO
        assert CubicSolver("newton") is CubicSolver.NEWTON


class TestSignedCbrt:
    @given(
        st.floats(min_value=-27.0, max_value=27.0, allow_nan=False),
    )
    def test_odd_symmetry_exact(self, v):
        assert signed_cbrt(-v) == -signed_cbrt(v)

    @given(
        st.floats(min_value=-12.0, max_value=6.0),
        st.sampled_from([-1.0, 1.0]),
    )
    @settings(max_examples=300)
    def test_cube_roundtrip_within_4ulp(self, exponent, sign):
        # Log-uniform magnitudes across eighteen decades, both signs.
        v = sign * 10.0 ** exponent
        r = signed_cbrt(v)
        back = r * r * r
        assert abs(back - v) <= 4.0 * np.spacing(abs(v))

    def test_exact_cubes(self):
        assert signed_cbrt(8.0) == 2.0
        assert signed_cbrt(-8.0) == -2.0
        assert signed_cbrt(0.0) == 0.0
        assert signed_cbrt(1.0) == 1.0

    def test_array_input(self):
        out = signed_cbrt(np.array([-8.0, 0.0, 27.0]))
        assert np.array_equal(out, [-2.0, 0.0, 3.0])


class TestChromaticity:
    def test_known_point(self):
        x, y = chromaticity(XyzColor(12.0, 67.0, 20.0))
        assert x == pytest.approx(12.0 / 99.0, rel=1e-15)
        assert y == pytest.approx(67.0 / 99.0, rel=1e-15)

    @given(
        st.floats(min_value=0.01, max_value=150.0),
        st.floats(min_value=0.01, max_value=150.0),
        st.floats(min_value=0.01, max_value=150.0),
        st.sampled_from([1e-3, 1.0, 1e3]),
    )
    @settings(max_examples=300)
    def test_scale_invariance(self, X, Y, Z, s):
        x1, y1 = chromaticity(XyzColor(X, Y, Z))
        x2, y2 = chromaticity(XyzColor(s * X, s * Y, s * Z))
        assert abs(x1 - x2) <= 1e-14
        assert abs(y1 - y2) <= 1e-14

    @pytest.mark.parametrize(
        "c",
        [
            XyzColor(0.0, 0.0, 0.0),
            XyzColor(1.0, -2.0, 1.0),  # sum <= 0
            XyzColor(-3.0, 1.0, 1.0),
            XyzColor(float("nan"), 1.0, 1.0),
            XyzColor(float("inf"), 1.0, 1.0),
        ],
    )
    def test_degenerate_inputs_raise(self, c):
        with pytest.raises(DegenerateInput):
            chromaticity(c)


class TestKFactor:
    def test_literal_polynomial(self):
        x, y = 0.31, 0.33
        expected = (
            4.4934 * x * x
            + 4.3034 * y * y
            - 4.276 * x * y
            - 1.3744 * x
            - 2.5643 * y
            + 1.8103
        )
        assert k_factor(x, y) == expected

    def test_positive_over_plane(self):
        # The quadratic form is positive definite and dominates the linear
        # part, so the factor stays positive over a wide chromaticity range.
        xs, ys = np.meshgrid(np.linspace(-2, 3, 101), np.linspace(-2, 3, 101))
        assert np.all(k_factor(xs, ys) > 0.0)

    def test_vectorized_matches_scalar(self):
        xs = np.array([0.1, 0.3, 0.5])
        ys = np.array([0.2, 0.4, 0.6])
        vec = k_factor(xs, ys)
        for i in range(3):
            assert vec[i] == k_factor(float(xs[i]), float(ys[i]))
