"""Bidirectional conversion between CIEXYZ and the OSA-UCS Lgj color space.

The forward direction (XYZ to Lgj) is closed-form.  The inverse has no
closed form: a lightness cubic is solved first (Cardano or Newton), then a
safeguarded Newton iteration drives the remaining scalar residual to zero.
Scalar, batch (structure-of-arrays, masked iteration), CLI, figure-data,
and benchmark layers all share the same literal arithmetic.
"""

from .core import (
    CONSTANTS,
    ConversionConstants,
    CubicSolver,
    LgjColor,
    SolveOptions,
    XyzColor,
    chromaticity,
    k_factor,
    signed_cbrt,
)
from .errors import (
    ConvergenceFailure,
    DegenerateInput,
    NumericalFailure,
    SingularityHit,
)
from .forward import ab_from_rgb, lightness_from_y0, rgb_from_xyz, xyz_to_lgj
from .inverse import (
    CubicCoeffs,
    InverseTrace,
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
)
from .batch import (
    BatchReport,
    ColorBatch,
    batch_lgj_to_xyz,
    solve_t_cardano_batch,
    solve_t_newton_batch,
    batch_xyz_to_lgj,
)
from .figures import CurveTable, locate_singularity, sample_f_curve, sample_phi_curve
from .bench import BenchRecord, make_ingamut_lgj, run_all, run_cubic_bench, run_inverse_bench

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # core
    "CONSTANTS",
    "ConversionConstants",
    "CubicSolver",
    "LgjColor",
    "SolveOptions",
    "XyzColor",
    "chromaticity",
    "k_factor",
    "signed_cbrt",
    # errors
    "ConvergenceFailure",
    "DegenerateInput",
    "NumericalFailure",
    "SingularityHit",
    # forward
    "ab_from_rgb",
    "lightness_from_y0",
    "rgb_from_xyz",
    "xyz_to_lgj",
    # inverse
    "CubicCoeffs",
    "InverseTrace",
    "cubic_f",
    "cubic_f_derivative",
    "gather_from_t",
    "largest_sum_zero",
    "lgj_to_xyz",
    "lprime_from_l",
    "phi",
    "phi_derivative",
    "solve_t_cardano",
    "solve_t_newton",
    "tentative_sum",
    # batch
    "BatchReport",
    "ColorBatch",
    "batch_lgj_to_xyz",
    "solve_t_cardano_batch",
    "solve_t_newton_batch",
    "batch_xyz_to_lgj",
    # figures
    "CurveTable",
    "locate_singularity",
    "sample_f_curve",
    "sample_phi_curve",
    # bench
    "BenchRecord",
    "make_ingamut_lgj",
    "run_all",
    "run_cubic_bench",
    "run_inverse_bench",
]
