"""Scalar inverse conversion Lgj -> XYZ."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from osaucs import (
    CONSTANTS,
    ConvergenceFailure,
    CubicCoeffs,
    CubicSolver,
    DegenerateInput,
    InverseTrace,
    LgjColor,
    NumericalFailure,
    SingularityHit,
    SolveOptions,
    XyzColor,
    cubic_f,
    cubic_f_derivative,
    gather_from_t,
    largest_sum_zero,
    lgj_to_xyz,
    lprime_from_l,
    phi,
    phi_derivative,
    solve_t_cardano,
    solve_t_newton,
    tentative_sum,
    xyz_to_lgj,
)
from osaucs.inverse import _phi_terms

# Lightness-cubic roots frozen from a 300-step extended-precision bisection
# (residual bracketed to the 80-bit noise floor); worst closed-form
# deviation measured at 1.9e-16 relative.
ROOT_TABLE = [
    (0.1, 0.8133347049173056),
    (0.5, 0.8809173123235098),
    (1.0, 0.9653442478745411),
    (5.0, 1.63791716516039),
    (14.3993, 3.10723250595373),
    (25.0, 4.726377840424495),
    (25.115653055433082, 4.745003985562195),
    (40.0, 7.154288174591477),
    (60.0, 10.403142006972086),
    (80.0, 13.654750666522814),
    (100.0, 16.90718958354337),
    (120.0, 20.15996581987384),
]

# The worked example (forward image of XYZ (12, 67, 20)) and its gathered
# parameters, frozen at full precision.
EXAMPLE_LGJ = LgjColor(7.577605915085909, 21.087837172711474, 9.195525409487065)
EXAMPLE_LP = 25.115653055433082
EXAMPLE_A = 20.203318920117702
EXAMPLE_B = 8.809823926671825
EXAMPLE_Y0 = 106.83406283032343
EXAMPLE_POLE = 0.5965204641848283  # bisection on the tentative sum
EXAMPLE_PHI_AT_MINUS_1 = -107.41302764639543
EXAMPLE_PHI_AT_5 = 106.70572424339082

# A chroma pair with no XYZ preimage: a dense scan of phi right of its pole
# (400k points spanning nine decades of offset) never changes sign, with
# |phi| >= 121.7 throughout.
NO_PREIMAGE = LgjColor(0.0, 60.0, 0.0)


def _example_params():
    t = solve_t_cardano(EXAMPLE_LP)
    return gather_from_t(t, EXAMPLE_LP, EXAMPLE_LGJ.g, EXAMPLE_LGJ.j)


class TestLightnessCubic:
    def test_lprime_from_l(self):
        assert lprime_from_l(0.0) == 14.3993
        assert lprime_from_l(EXAMPLE_LGJ.L) == EXAMPLE_LP

    def test_coeffs_match_expanded_form(self):
        cc = CubicCoeffs.from_lightness(25.0)
        u = 25.0 / 5.9 + 2.0 / 3.0
        v = 0.042 ** 3
        assert cc.u == u
        assert cc.v == v
        assert cc.a3 == -(v + 1.0)
        assert cc.b2 == 3.0 * u
        assert cc.c1 == -3.0 * u * u
        assert cc.d0 == u * u * u + 30.0 * v

    def test_coeffs_reproduce_cubic(self):
        cc = CubicCoeffs.from_lightness(40.0)
        for t in (0.5, 2.0, 7.0, 12.0):
            expanded = cc.a3 * t ** 3 + cc.b2 * t ** 2 + cc.c1 * t + cc.d0
            assert expanded == pytest.approx(cubic_f(t, 40.0), rel=1e-12, abs=1e-12)

    def test_discriminant_positive(self):
        for lp in np.linspace(0.0, 120.0, 50):
            assert CubicCoeffs.from_lightness(float(lp)).discriminant() > 0.0

    def test_derivative_matches_difference_quotient(self):
        h = 1e-7
        for t in (0.8, 3.0, 9.0):
            fd = (cubic_f(t + h, 25.0) - cubic_f(t - h, 25.0)) / (2.0 * h)
            assert cubic_f_derivative(t, 25.0) == pytest.approx(fd, rel=1e-6)

    def test_cardano_against_bisection_oracle(self):
        for lp, root in ROOT_TABLE:
            t = solve_t_cardano(lp)
            assert abs(t - root) <= 4e-16 * max(1.0, abs(root))
            assert abs(cubic_f(t, lp)) <= 1e-10 * max(1.0, abs(t) ** 3)

    def test_newton_against_bisection_oracle(self):
        for lp, root in ROOT_TABLE:
            t, iterations = solve_t_newton(lp)
            assert abs(t - root) <= 1e-12 * max(1.0, abs(root))
            assert iterations <= 20

    @given(st.floats(min_value=0.1, max_value=120.0))
    @settings(max_examples=300)
    def test_solvers_agree(self, lp):
        tc = solve_t_cardano(lp)
        tn, _ = solve_t_newton(lp)
        assert abs(tc - tn) <= 1e-12 * max(1.0, abs(tc))

    def test_cardano_rejects_nonfinite(self):
        with pytest.raises(DegenerateInput):
            solve_t_cardano(float("nan"))

    def test_newton_rejects_nonfinite(self):
        with pytest.raises(DegenerateInput):
            solve_t_newton(float("inf"))

    def test_newton_exhausts_budget(self):
        with pytest.raises(ConvergenceFailure):
            solve_t_newton(120.0, SolveOptions(max_iter=2))


class TestGather:
    def test_recovers_forward_parameters(self):
        y0, C, a, b = _example_params()
        assert y0 == pytest.approx(EXAMPLE_Y0, rel=1e-15)
        assert a == pytest.approx(EXAMPLE_A, rel=1e-15)
        assert b == pytest.approx(EXAMPLE_B, rel=1e-15)
        # The pair scales back to the opponent inputs.
        assert C * a == pytest.approx(EXAMPLE_LGJ.g, rel=1e-15)
        assert C * b == pytest.approx(EXAMPLE_LGJ.j, rel=1e-15)

    def test_degenerate_t_raises(self):
        with pytest.raises(DegenerateInput):
            gather_from_t(2.0 / 3.0, 0.0, 1.0, 1.0)

    def test_zero_chroma_norm_raises(self):
        # lp = 0 with t far from 2/3 gives C = 0.
        with pytest.raises(DegenerateInput):
            gather_from_t(1.0, 0.0, 1.0, 1.0)


class TestPhi:
    def test_frozen_endpoint_values(self):
        y0, _, a, b = _example_params()
        val, xyz = phi(-1.0, a, b, y0)
        assert val == pytest.approx(EXAMPLE_PHI_AT_MINUS_1, abs=1e-9)
        assert isinstance(xyz, XyzColor)
        val, _ = phi(5.0, a, b, y0)
        assert val == pytest.approx(EXAMPLE_PHI_AT_5, abs=1e-9)

    def test_root_of_phi_is_conversion_answer(self):
        y0, _, a, b = _example_params()
        xyz, trace = lgj_to_xyz(EXAMPLE_LGJ)
        val, tentative = phi(trace.w_root, a, b, y0)
        assert abs(val) <= 1e-12 * max(1.0, y0)
        assert tentative == xyz

    def test_pole_raises_singularity(self):
        y0, _, a, b = _example_params()
        with pytest.raises(SingularityHit):
            phi(largest_sum_zero(a, b), a, b, y0)

    def test_sum_changes_sign_at_pole(self):
        _, _, a, b = _example_params()
        z = largest_sum_zero(a, b)
        assert tentative_sum(z - 1e-6, a, b) < 0.0
        assert tentative_sum(z + 1e-6, a, b) > 0.0

    def test_pole_location_frozen(self):
        _, _, a, b = _example_params()
        assert largest_sum_zero(a, b) == pytest.approx(EXAMPLE_POLE, abs=1e-10)

    def test_neutral_pair_pole_at_origin(self):
        # With a = b = 0 the tentative sum is a positive multiple of w^3.
        assert largest_sum_zero(0.0, 0.0) == 0.0
        assert tentative_sum(2.0, 0.0, 0.0) > 0.0

    def test_derivative_matches_finite_difference(self):
        rng = np.random.default_rng(11)
        checked = 0
        while checked < 100:
            c = XyzColor(*rng.uniform(1.0, 100.0, 3))
            lgj = xyz_to_lgj(c)
            lp = lprime_from_l(lgj.L)
            y0, _, a, b = gather_from_t(solve_t_cardano(lp), lp, lgj.g, lgj.j)
            z = largest_sum_zero(a, b)
            w = float(rng.uniform(z + 0.25, z + 6.0))
            h = 1e-6 * max(1.0, abs(w))
            fd = (phi(w + h, a, b, y0)[0] - phi(w - h, a, b, y0)[0]) / (2.0 * h)
            an = phi_derivative(w, a, b)
            assert abs(an - fd) <= 1e-5 * max(1.0, abs(an))
            checked += 1

    def test_derivative_independent_of_target(self):
        y0, _, a, b = _example_params()
        assert phi(3.0, a, b, 0.0)[0] - phi(3.0, a, b, y0)[0] == pytest.approx(
            y0, rel=1e-12
        )


class TestFullInverse:
    def test_worked_example_roundtrip(self):
        xyz, trace = lgj_to_xyz(EXAMPLE_LGJ)
        assert xyz.X == pytest.approx(12.0, abs=1e-8)
        assert xyz.Y == pytest.approx(67.0, abs=1e-8)
        assert xyz.Z == pytest.approx(20.0, abs=1e-8)
        assert isinstance(trace, InverseTrace)
        assert trace.iterations >= 1
        assert abs(trace.final_phi) <= 1e-12 * max(1.0, EXAMPLE_Y0)

    def test_start_point_already_root(self):
        # XYZ (100, 100, 0) maps to the color whose solution w equals the
        # fixed Newton starting point cbrt(79.9 + 41.94) making the solve
        # converge before taking any step.
        lgj = xyz_to_lgj(XyzColor(100.0, 100.0, 0.0))
        xyz, trace = lgj_to_xyz(lgj)
        assert trace.iterations == 0
        assert trace.w_root == CONSTANTS.w0
        assert xyz.X == pytest.approx(100.0, abs=1e-8)
        assert xyz.Y == pytest.approx(100.0, abs=1e-8)
        assert xyz.Z == pytest.approx(0.0, abs=1e-8)

    def test_converged_w_stays_right_of_pole(self):
        rng = np.random.default_rng(23)
        for _ in range(200):
            c = XyzColor(*rng.uniform(1.0, 100.0, 3))
            lgj = xyz_to_lgj(c)
            lp = lprime_from_l(lgj.L)
            _, _, a, b = gather_from_t(solve_t_cardano(lp), lp, lgj.g, lgj.j)
            _, trace = lgj_to_xyz(lgj)
            assert trace.w_root > largest_sum_zero(a, b)

    def test_right_inverse_property(self):
        # Whatever XYZ the inverse settles on, its forward image must be
        # the requested Lgj: the solve is a true right inverse even where
        # several XYZ share one image.
        rng = np.random.default_rng(29)
        for _ in range(200):
            lgj = xyz_to_lgj(XyzColor(*rng.uniform(1.0, 100.0, 3)))
            xyz, _ = lgj_to_xyz(lgj)
            again = xyz_to_lgj(xyz)
            scale = max(1.0, abs(lgj.L), abs(lgj.g), abs(lgj.j))
            assert abs(again.L - lgj.L) <= 1e-9 * scale
            assert abs(again.g - lgj.g) <= 1e-9 * scale
            assert abs(again.j - lgj.j) <= 1e-9 * scale

    def test_distinct_preimages_resolve_to_largest_root(self):
        # Two XYZ triples whose forward images agree to the last couple of
        # ulp; the residual has a root for each, and the solver's largest
        # root convention picks the second.  The first is thus unrecoverable
        # by the round trip - by design, not by accident.
        first = XyzColor(2.7682349583429016, 86.36457925316432, 12.00329138962852)
        second = XyzColor(3.52720828532345, 89.05594575159132, 13.070654024585778)
        img_first = xyz_to_lgj(first)
        img_second = xyz_to_lgj(second)
        assert img_first.L == img_second.L
        assert img_first.j == img_second.j
        assert abs(img_first.g - img_second.g) <= 4e-15
        back, _ = lgj_to_xyz(img_first)
        assert abs(back.X - second.X) <= 1e-9
        assert abs(back.Y - second.Y) <= 1e-9
        assert abs(back.Z - second.Z) <= 1e-9

    def test_no_preimage_raises_with_trace(self):
        with pytest.raises(ConvergenceFailure) as excinfo:
            lgj_to_xyz(NO_PREIMAGE)
        trace = excinfo.value.trace
        assert isinstance(trace, InverseTrace)
        assert trace.singularity_guard_hits > 0

    def test_newton_cubic_solver_option(self):
        xyz_c, _ = lgj_to_xyz(EXAMPLE_LGJ, SolveOptions(cubic_solver=CubicSolver.CARDANO))
        xyz_n, _ = lgj_to_xyz(EXAMPLE_LGJ, SolveOptions(cubic_solver=CubicSolver.NEWTON))
        assert xyz_c.X == pytest.approx(xyz_n.X, rel=1e-10)
        assert xyz_c.Y == pytest.approx(xyz_n.Y, rel=1e-10)
        assert xyz_c.Z == pytest.approx(xyz_n.Z, rel=1e-10)

    def test_fd_check_passes_on_clean_solve(self):
        xyz, _ = lgj_to_xyz(EXAMPLE_LGJ, SolveOptions(fd_check=True))
        assert xyz.X == pytest.approx(12.0, abs=1e-8)

    def test_iteration_budget_enforced(self):
        with pytest.raises(ConvergenceFailure):
            lgj_to_xyz(EXAMPLE_LGJ, SolveOptions(max_iter=1))

    def test_tight_tolerance_still_converges(self):
        xyz, trace = lgj_to_xyz(EXAMPLE_LGJ, SolveOptions(newton_tol=1e-14))
        assert abs(trace.final_phi) <= 1e-14 * max(1.0, EXAMPLE_Y0)

    @pytest.mark.parametrize(
        "bad",
        [
            LgjColor(float("nan"), 0.0, 0.0),
            LgjColor(0.0, float("inf"), 0.0),
            LgjColor(0.0, 0.0, float("-inf")),
        ],
    )
    def test_nonfinite_raises(self, bad):
        with pytest.raises(DegenerateInput):
            lgj_to_xyz(bad)

    @given(
        st.floats(min_value=1.0, max_value=100.0),
        st.floats(min_value=1.0, max_value=100.0),
        st.floats(min_value=1.0, max_value=100.0),
    )
    @settings(max_examples=150, deadline=None)
    def test_never_fails_inside_cube(self, X, Y, Z):
        # Every color in the box has a representable image; the inverse must
        # converge (possibly to a partner preimage, never to an error).
        lgj = xyz_to_lgj(XyzColor(X, Y, Z))
        xyz, trace = lgj_to_xyz(lgj)
        assert math.isfinite(xyz.X)
        assert trace.iterations <= 100


class TestGridInvariants:
    def test_cubic_derivative_negative_on_grid(self):
        lps = np.linspace(0.0, 120.0, 100)
        ts = np.linspace(0.0, 10.0, 100)
        tt, ll = np.meshgrid(ts, lps)
        assert np.all(cubic_f_derivative(tt, ll) < 0.0)

    def test_discriminant_positive_on_grid(self):
        for lp in np.linspace(0.0, 120.0, 100):
            assert CubicCoeffs.from_lightness(float(lp)).discriminant() > 0.0
