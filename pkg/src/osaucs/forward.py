"""Closed-form forward conversion XYZ → Lgj.

The pipeline is: chromaticity → ``K`` polynomial → modified luminance
``Y0 = Y*K`` → lightness pair ``(L', C)`` → RGB working vector → ``(a, b)``
from cube-rooted RGB → final ``(L, g, j)``.

Each stage exists both as a validated scalar operation and as an unchecked
polymorphic core (module-private ``_*_terms`` functions).  The public scalar
:func:`xyz_to_lgj` is literally the composition of the staged cores, and the
batch engine evaluates the same cores on whole arrays, so scalar and batch
results are bit-identical.
"""

from __future__ import annotations

import numpy as np

from .core import (
    CONSTANTS,
    LgjColor,
    Real,
    XyzColor,
    _chromaticity_terms,
    chromaticity,
    k_factor,
    signed_cbrt,
)
from .errors import DegenerateInput

__all__ = [
    "lightness_from_y0",
    "rgb_from_xyz",
    "ab_from_rgb",
    "xyz_to_lgj",
]

_DIV = CONSTANTS.lightness_divisor
_SHIFT = CONSTANTS.lightness_shift
_SMALL = CONSTANTS.small_term
_L_OFFSET = CONSTANTS.L_offset
_L_SCALE = CONSTANTS.L_scale

_M00, _M01, _M02 = (float(v) for v in CONSTANTS.M[0])
_M10, _M11, _M12 = (float(v) for v in CONSTANTS.M[1])
_M20, _M21, _M22 = (float(v) for v in CONSTANTS.M[2])

_A00, _A01, _A02 = (float(v) for v in CONSTANTS.A[0])
_A10, _A11, _A12 = (float(v) for v in CONSTANTS.A[1])

# Y0 at which the lightness denominator cbrt(Y0) - 2/3 vanishes.
def _lightness_terms(y0: Real) -> tuple:
    """Unchecked lightness pair ``(L', C)`` from the modified luminance."""
    root = signed_cbrt(y0)
    l_prime = _DIV * (root - _SHIFT + _SMALL * signed_cbrt(y0 - 30.0))
    chroma_norm = l_prime / (_DIV * (root - _SHIFT))
    return l_prime, chroma_norm


def lightness_from_y0(y0: float) -> tuple:
    """Lightness ``L'`` and chroma normalizer ``C`` from ``Y0``.

    ``L' = 5.9 (cbrt(Y0) - 2/3 + 0.042 cbrt(Y0 - 30))`` and
    ``C = L' / (5.9 (cbrt(Y0) - 2/3))``; the second radicand is negative for
    ``Y0 < 30`` and uses the signed cube root.

    Raises
    ------
    DegenerateInput
        If ``Y0`` is not strictly positive, or ``cbrt(Y0)`` is within 1e-14
        of 2/3 (zero denominator).
    """
    if not np.isfinite(y0) or y0 <= 0.0:
        raise DegenerateInput(f"Y0 must be finite and positive, got {y0!r}")
    if abs(signed_cbrt(y0) - _SHIFT) < 1e-14:
        raise DegenerateInput(
            f"Y0 = {y0!r} makes the lightness denominator vanish (cbrt(Y0) = 2/3)"
        )
    l_prime, chroma_norm = _lightness_terms(y0)
    return float(l_prime), float(chroma_norm)


def _rgb_terms(X: Real, Y: Real, Z: Real) -> tuple:
    """Unchecked linear map to the RGB working vector."""
    R = _M00 * X + _M01 * Y + _M02 * Z
    G = _M10 * X + _M11 * Y + _M12 * Z
    B = _M20 * X + _M21 * Y + _M22 * Z
    return R, G, B


def rgb_from_xyz(c: XyzColor) -> tuple:
    """RGB working vector ``M @ [X, Y, Z]``.

    Total on finite inputs; negative results are legal and handled downstream
    by signed cube roots.
    """
    R, G, B = _rgb_terms(c.X, c.Y, c.Z)
    return float(R), float(G), float(B)


def _ab_terms(R: Real, G: Real, B: Real) -> tuple:
    """Unchecked map from the RGB working vector to ``(a, b)``."""
    cr = signed_cbrt(R)
    cg = signed_cbrt(G)
    cb = signed_cbrt(B)
    a = _A00 * cr + _A01 * cg + _A02 * cb
    b = _A10 * cr + _A11 * cg + _A12 * cb
    return a, b


def ab_from_rgb(R: float, G: float, B: float) -> tuple:
    """Opponent coordinates ``(a, b) = A @ cbrt([R, G, B])``.

    Both rows of the coefficient matrix sum to zero, so equal R, G, B give
    ``a = b = 0`` (up to one rounding of the row sum).
    """
    a, b = _ab_terms(R, G, B)
    return float(a), float(b)


def _finalize_terms(l_prime: Real, chroma_norm: Real, a: Real, b: Real) -> tuple:
    """Unchecked final assembly of ``(L, g, j)``."""
    L = (l_prime - _L_OFFSET) / _L_SCALE
    g = chroma_norm * a
    j = chroma_norm * b
    return L, g, j


def xyz_to_lgj(c: XyzColor) -> LgjColor:
    """Convert one XYZ triple to OSA-UCS ``(L, g, j)``.

    This is literally the composition of :func:`~osaucs.core.chromaticity`,
    :func:`~osaucs.core.k_factor`, :func:`lightness_from_y0`,
    :func:`rgb_from_xyz`, and :func:`ab_from_rgb`, followed by the affine
    lightness offset and the chroma scaling.

    Raises
    ------
    DegenerateInput
        Propagated from the staged operations (non-positive component sum,
        non-positive ``Y0``, vanishing lightness denominator).
    """
    c = XyzColor(float(c[0]), float(c[1]), float(c[2]))
    x, y = chromaticity(c)
    K = k_factor(x, y)
    y0 = c.Y * K
    l_prime, chroma_norm = lightness_from_y0(y0)
    R, G, B = rgb_from_xyz(c)
    a, b = ab_from_rgb(R, G, B)
    L, g, j = _finalize_terms(l_prime, chroma_norm, a, b)
    return LgjColor(float(L), float(g), float(j))
