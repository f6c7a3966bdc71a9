"""Domain types, fixed constants, and shared scalar utilities.

Everything numerical in this package is 64-bit binary floating point.  The
transform matrices are stored exactly as published for the OSA-UCS color
system; their inverses are computed once at import time with a closed-form
3×3 inversion so that both transform directions share bit-identical
constants.

The low-level helpers (:func:`signed_cbrt`, :func:`k_factor`, and the
chromaticity projection) are polymorphic over scalars and numpy arrays: the
scalar conversion path and the vectorized batch engine evaluate the very same
expressions, which keeps their results bit-for-bit comparable.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from .errors import DegenerateInput

__all__ = [
    "XyzColor",
    "LgjColor",
    "CubicSolver",
    "SolveOptions",
    "ConversionConstants",
    "CONSTANTS",
    "signed_cbrt",
    "chromaticity",
    "k_factor",
]

Real = Union[float, np.ndarray]


class XyzColor(NamedTuple):
    """CIEXYZ tristimulus triple on the 0–100 scale.

    Conversion input additionally requires a positive component sum
    (otherwise the chromaticity projection is undefined).
    """

    X: float
    Y: float
    Z: float


class LgjColor(NamedTuple):
    """OSA-UCS coordinates: lightness ``L`` and the signed chroma-like axes
    ``g`` (greenness–redness) and ``j`` (yellowness–blueness)."""

    L: float
    g: float
    j: float


class CubicSolver(enum.Enum):
    """Which solver recovers the lightness cubic's real root."""

    CARDANO = "cardano"
    NEWTON = "newton"


@dataclass(frozen=True)
class SolveOptions:
    """Options for the inverse transform.

    Parameters
    ----------
    cubic_solver:
        Closed-form Cardano (default) or Newton iteration for the lightness
        cubic.
    newton_tol:
        Convergence tolerance; the residual iteration stops when
        ``|phi| <= newton_tol * max(1, Y0_target)``.
    max_iter:
        Iteration cap for the Newton loops.
    fd_check:
        When true, every analytic derivative used by the scalar inverse is
        cross-checked against a central finite difference (diagnostic mode).
    """

    cubic_solver: CubicSolver = CubicSolver.CARDANO
    newton_tol: float = 1e-12
    max_iter: int = 100
    fd_check: bool = False

    def __post_init__(self) -> None:
        if not (self.newton_tol > 0.0):
            raise ValueError(f"newton_tol must be positive, got {self.newton_tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")


def _invert_3x3(m: np.ndarray) -> np.ndarray:
    """Closed-form inverse (adjugate over determinant) of a 3×3 matrix."""
    a, b, c = m[0]
    d, e, f = m[1]
    g, h, i = m[2]
    det = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    adjugate = np.array(
        [
            [e * i - f * h, c * h - b * i, b * f - c * e],
            [f * g - d * i, a * i - c * g, c * d - a * f],
            [d * h - e * g, b * g - a * h, a * e - b * d],
        ]
    )
    return adjugate / det


def _det_3x3(m: np.ndarray) -> float:
    a, b, c = m[0]
    d, e, f = m[1]
    g, h, i = m[2]
    return float(a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g))


@dataclass(frozen=True)
class ConversionConstants:
    """All fixed numerical data of the OSA-UCS transforms.

    ``M`` maps XYZ to the RGB working vector; ``A`` maps cube-rooted RGB to
    ``(a, b)``.  ``A_tilde`` is ``A`` with the appended row ``[1, 0, 0]``
    (so the free inverse variable is ``w = cbrt(R)``), the standard
    nonsingular completion.  ``w0`` is the fixed initial guess for the
    inverse residual iteration: the ``w`` of the extreme color
    ``X = Y = 100, Z = 0``.
    """

    M: np.ndarray
    M_inv: np.ndarray
    A: np.ndarray
    A_tilde: np.ndarray
    A_tilde_inv: np.ndarray
    L_offset: float
    L_scale: float
    lightness_divisor: float
    lightness_shift: float
    small_term: float
    w0: float

    @staticmethod
    def create() -> "ConversionConstants":
        m = np.array(
            [
                [0.7990, 0.4194, -0.1648],
                [-0.4493, 1.3265, 0.0927],
                [-0.1149, 0.3394, 0.7170],
            ]
        )
        a = np.array(
            [
                [-13.7, 17.7, -4.0],
                [1.7, 8.0, -9.7],
            ]
        )
        a_tilde = np.vstack([a, [1.0, 0.0, 0.0]])
        consts = ConversionConstants(
            M=m,
            M_inv=_invert_3x3(m),
            A=a,
            A_tilde=a_tilde,
            A_tilde_inv=_invert_3x3(a_tilde),
            L_offset=14.3993,
            L_scale=math.sqrt(2.0),
            lightness_divisor=5.9,
            lightness_shift=2.0 / 3.0,
            small_term=0.042,
            w0=float(np.cbrt(79.9 + 41.94)),
        )
        for arr in (consts.M, consts.M_inv, consts.A, consts.A_tilde, consts.A_tilde_inv):
            arr.setflags(write=False)
        return consts

    def det_a_tilde(self) -> float:
        return _det_3x3(self.A_tilde)


CONSTANTS = ConversionConstants.create()


def signed_cbrt(r: Real) -> Real:
    """Real (sign-preserving) cube root.

    ``signed_cbrt(r)**3 == r`` up to rounding and ``signed_cbrt(-r) ==
    -signed_cbrt(r)`` exactly; needed because several pipeline radicands
    (e.g. ``Y0 - 30``) are legitimately negative.  Accepts scalars or
    arrays.
    """
    return np.cbrt(r)


def _chromaticity_terms(X: Real, Y: Real, Z: Real) -> tuple:
    """Chromaticity projection without validation (shared with the batch engine)."""
    s = X + Y + Z
    return X / s, Y / s


def chromaticity(c: XyzColor) -> tuple:
    """Project a tristimulus triple to chromaticity coordinates ``(x, y)``.

    Raises
    ------
    DegenerateInput
        If any component is non-finite or the component sum is not positive.
    """
    s = c.X + c.Y + c.Z
    if not np.isfinite(s) or s <= 0.0:
        raise DegenerateInput(
            f"chromaticity requires a finite, positive component sum; got X+Y+Z = {s!r}"
        )
    x, y = _chromaticity_terms(c.X, c.Y, c.Z)
    return float(x), float(y)


def k_factor(x: Real, y: Real) -> Real:
    """Quadratic luminance-modification polynomial ``K(x, y)``.

    ``K`` rescales ``Y`` to the modified luminance ``Y0 = Y * K`` that
    drives OSA-UCS lightness.  Accepts scalars or arrays.
    """
    return (
        4.4934 * x * x
        + 4.3034 * y * y
        - 4.276 * x * y
        - 1.3744 * x
        - 2.5643 * y
        + 1.8103
    )
