"""Sampled curve tables for the two diagnostic plots.

Two one-dimensional cuts through the conversion machinery, emitted as
plain tables so any external plotting tool can consume them:

* the lightness cubic ``f(t)`` at fixed ``L'`` (smooth, root-bracketing);
* the inverse residual ``phi(w)`` at fixed color (rational in ``w`` with a
  pole where the tentative tristimulus sum vanishes).

Grid points that land on the pole of ``phi`` (tentative sum zero to within
the same relative tolerance the solver uses) are still emitted, but with
``gap`` set and a NaN value, so plots break the line instead of connecting
across the pole.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import LgjColor
from .errors import DegenerateInput
from .inverse import (
    _phi_terms,
    _SINGULARITY_RTOL,
    gather_from_t,
    cubic_f,
    largest_sum_zero,
    lprime_from_l,
    solve_t_cardano,
)

__all__ = ["CurveTable", "sample_f_curve", "sample_phi_curve", "locate_singularity"]


@dataclass(frozen=True)
class CurveTable:
    """One sampled curve: aligned abscissae, values, and gap markers.

    ``gap[i]`` marks a grid point where the curve is not representable (a
    pole); ``y[i]`` is NaN there.  Smooth curves have an all-False mask.
    """

    x: np.ndarray
    y: np.ndarray
    gap: np.ndarray

    def __len__(self) -> int:
        return int(self.x.size)


def _validate_grid(lo: float, hi: float, n: int) -> None:
    if not (np.isfinite(lo) and np.isfinite(hi)):
        raise DegenerateInput(f"grid bounds must be finite, got [{lo!r}, {hi!r}]")
    if not lo < hi:
        raise DegenerateInput(f"grid bounds must satisfy min < max, got [{lo!r}, {hi!r}]")
    if n < 2:
        raise DegenerateInput(f"grid needs at least 2 points, got {n}")


def sample_f_curve(l_prime: float, t_min: float, t_max: float, n: int) -> CurveTable:
    """Sample the lightness cubic ``f(t)`` on a uniform grid.

    The cubic is smooth, so the gap mask is all False.
    """
    _validate_grid(t_min, t_max, n)
    if not np.isfinite(l_prime):
        raise DegenerateInput(f"L' must be finite, got {l_prime!r}")
    t = np.linspace(t_min, t_max, n)
    y = cubic_f(t, float(l_prime))
    return CurveTable(t, np.asarray(y, dtype=np.float64), np.zeros(n, dtype=bool))


def _gather_for_color(c: LgjColor) -> tuple:
    l_prime = float(lprime_from_l(float(c.L)))
    t = solve_t_cardano(l_prime)
    y0, _, a, b = gather_from_t(t, l_prime, float(c.g), float(c.j))
    return y0, a, b


def sample_phi_curve(c: LgjColor, w_min: float, w_max: float, n: int) -> CurveTable:
    """Sample the inverse residual ``phi(w)`` for one color on a uniform grid.

    Runs the lightness and gather stages once, then evaluates ``phi`` at
    every grid point.  Points on the pole (or with a non-finite value) are
    emitted with the gap marker set and a NaN value.
    """
    _validate_grid(w_min, w_max, n)
    y0, a, b = _gather_for_color(c)
    w = np.linspace(w_min, w_max, n)
    terms = _phi_terms(w, a, b, y0)
    scale = np.maximum(np.abs(terms.X), np.maximum(np.abs(terms.Y), np.abs(terms.Z)))
    gap = (np.abs(terms.S) < _SINGULARITY_RTOL * scale) | ~np.isfinite(terms.phi)
    y = np.where(gap, np.nan, terms.phi)
    return CurveTable(w, np.asarray(y, dtype=np.float64), gap)


def locate_singularity(c: LgjColor) -> float:
    """Location of the pole of ``phi`` for one color.

    This is the largest real zero of the tentative tristimulus sum for the
    color's gathered ``(a, b)`` pair — the same floor the inverse iteration
    stays above.
    """
    _, a, b = _gather_for_color(c)
    return largest_sum_zero(a, b)
