"""Vectorized batch conversions over structure-of-arrays color sets.

Both directions run chunk-by-chunk (64Ki lanes per chunk) over the same
literal expressions as the scalar paths, so batch results track scalar
results to machine precision.  The inverse uses a masked, array-wide
Newton iteration: every lane carries its own iterate, converged or failed
lanes are frozen in place (no compaction), and the same safeguards as the
scalar solver (pole floor, monotone residual decrease, step halving, stall
floor) are applied lane-wise.

Failed lanes come back as NaN in the output arrays and are listed in
``BatchReport.failed_indices``; one bad lane never disturbs its neighbors.

Thread-based chunk parallelism is available via ``workers=`` for very
large batches (at least 2^20 lanes).  Chunks are fixed-size and write
disjoint output slices, so results are bit-identical with any worker
count.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import CubicSolver, SolveOptions
from .forward import _ab_terms, _finalize_terms, _lightness_terms, _rgb_terms
from .inverse import (
    _cardano_terms,
    _dphi_terms,
    _largest_real_root_cubic,
    _phi_terms,
    _sum_zero_coeffs,
    _L_OFFSET,
    _L_SCALE,
    _DIV,
    _SHIFT,
    _STEP_FLOOR,
    _MAX_HALVINGS,
    _SINGULARITY_RTOL,
    _V,
    _W0,
)

__all__ = [
    "ColorBatch",
    "BatchReport",
    "batch_xyz_to_lgj",
    "batch_lgj_to_xyz",
    "solve_t_cardano_batch",
    "solve_t_newton_batch",
]

_CHUNK = 65536
_THREAD_THRESHOLD = 1 << 20


def _as_component(v, name: str) -> np.ndarray:
    arr = np.ascontiguousarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"component {name} must be one-dimensional, got shape {arr.shape}")
    return arr


@dataclass
class ColorBatch:
    """Structure-of-arrays color set: three aligned float64 component vectors.

    For XYZ batches the components are (X, Y, Z); for Lgj batches they are
    (L, g, j), in that order.  ``valid``, when given, marks lanes that are
    usable at all (False lanes are reported failed without being evaluated);
    it is an optional extension used by the CLI for rows carried through a
    partial-failure report.
    """

    c0: np.ndarray
    c1: np.ndarray
    c2: np.ndarray
    valid: Optional[np.ndarray] = field(default=None)

    def __post_init__(self) -> None:
        self.c0 = _as_component(self.c0, "c0")
        self.c1 = _as_component(self.c1, "c1")
        self.c2 = _as_component(self.c2, "c2")
        if not (self.c0.size == self.c1.size == self.c2.size):
            raise ValueError(
                "component vectors must be aligned, got sizes"
                f" {self.c0.size}, {self.c1.size}, {self.c2.size}"
            )
        if self.valid is not None:
            self.valid = np.ascontiguousarray(self.valid, dtype=bool)
            if self.valid.shape != self.c0.shape:
                raise ValueError("valid mask must align with the component vectors")

    def __len__(self) -> int:
        return int(self.c0.size)

    @staticmethod
    def from_rows(rows) -> "ColorBatch":
        arr = np.ascontiguousarray(rows, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] != 3:
            raise ValueError(f"expected an (n, 3) array of rows, got shape {arr.shape}")
        return ColorBatch(arr[:, 0].copy(), arr[:, 1].copy(), arr[:, 2].copy())

    def to_rows(self) -> np.ndarray:
        return np.stack([self.c0, self.c1, self.c2], axis=1)


@dataclass(frozen=True)
class BatchReport:
    """Outcome summary of one batch conversion.

    ``converged + len(failed_indices)`` always equals the batch length.
    ``max_iterations_used`` is the largest per-lane Newton iteration count
    (0 for the closed-form forward direction).
    """

    converged: int
    failed_indices: np.ndarray
    max_iterations_used: int
    wall_time: float


# ---------------------------------------------------------------------------
# Forward direction
# ---------------------------------------------------------------------------

def _forward_chunk(X, Y, Z, out0, out1, out2, fail_out) -> int:
    with np.errstate(all="ignore"):
        finite = np.isfinite(X) & np.isfinite(Y) & np.isfinite(Z)
        s = X + Y + Z
        bad = ~finite | ~(s > 0.0)
        x = X / s
        y = Y / s
        K = (
            4.4934 * x * x
            + 4.3034 * y * y
            - 4.276 * x * y
            - 1.3744 * x
            - 2.5643 * y
            + 1.8103
        )
        y0 = Y * K
        root = np.cbrt(y0)
        bad |= ~(y0 > 0.0) | (np.abs(root - _SHIFT) < 1e-14)
        l_prime, chroma_norm = _lightness_terms(y0)
        R, G, B = _rgb_terms(X, Y, Z)
        a, b = _ab_terms(R, G, B)
        L, g, j = _finalize_terms(l_prime, chroma_norm, a, b)
        bad |= ~(np.isfinite(L) & np.isfinite(g) & np.isfinite(j))
    out0[...] = np.where(bad, np.nan, L)
    out1[...] = np.where(bad, np.nan, g)
    out2[...] = np.where(bad, np.nan, j)
    fail_out[...] = bad
    return 0


# ---------------------------------------------------------------------------
# Lightness cubic, batch solvers
# ---------------------------------------------------------------------------

def solve_t_cardano_batch(l_prime) -> np.ndarray:
    """Closed-form lightness-cubic roots for a vector of ``L'`` values.

    Runs chunk-by-chunk so the temporaries stay cache-resident.  Lanes with
    a nonpositive discriminant or non-finite input come back NaN.
    """
    lp = np.ascontiguousarray(l_prime, dtype=np.float64)
    out = np.empty_like(lp)
    with np.errstate(all="ignore"):
        for lo in range(0, lp.size, _CHUNK):
            hi = min(lo + _CHUNK, lp.size)
            piece = lp[lo:hi]
            t, disc = _cardano_terms(piece)
            out[lo:hi] = np.where(np.isfinite(piece) & (disc > 0.0), t, np.nan)
    return out


def _newton_t_chunk(lp, tol: float, max_iter: int, out, iters) -> None:
    u = lp / _DIV + _SHIFT
    t = u.copy()
    active = np.isfinite(lp)
    out[...] = np.nan
    for _ in range(max_iter):
        if not active.any():
            break
        d = u - t
        f = d * d * d - _V * (t * t * t - 30.0)
        fp = -3.0 * d * d - 3.0 * _V * t * t
        broken = active & ((fp == 0.0) | ~np.isfinite(fp))
        active &= ~broken
        step = np.where(active, f / np.where(fp == 0.0, 1.0, fp), 0.0)
        t_next = t - step
        iters[active] += 1
        abs_t = np.abs(t)
        done = active & (
            (np.abs(f) <= tol * np.maximum(1.0, abs_t ** 3))
            & (np.abs(step) <= tol * np.maximum(1.0, abs_t))
        )
        done |= active & (np.abs(step) < _STEP_FLOOR * abs_t)
        out[done] = t_next[done]
        active &= ~done
        t = np.where(active, t_next, t)


def solve_t_newton_batch(l_prime, opts: Optional[SolveOptions] = None) -> tuple:
    """Newton lightness-cubic roots for a vector of ``L'`` values.

    Mirrors the scalar iteration lane-wise (same start, same two-part stop
    test, same step floor), chunked like the closed-form solver.  Returns
    ``(t, iterations)``; lanes that fail to converge within
    ``opts.max_iter`` come back NaN.
    """
    if opts is None:
        opts = SolveOptions()
    lp = np.ascontiguousarray(l_prime, dtype=np.float64)
    out = np.empty_like(lp)
    iters = np.zeros(lp.shape, dtype=np.int64)
    with np.errstate(all="ignore"):
        for lo in range(0, lp.size, _CHUNK):
            hi = min(lo + _CHUNK, lp.size)
            _newton_t_chunk(
                lp[lo:hi], opts.newton_tol, opts.max_iter, out[lo:hi], iters[lo:hi]
            )
    return out, iters


# ---------------------------------------------------------------------------
# Inverse direction
# ---------------------------------------------------------------------------

def _inverse_chunk(L, g, j, out0, out1, out2, fail_out, opts: SolveOptions) -> int:
    n = L.size
    with np.errstate(all="ignore"):
        failed = ~(np.isfinite(L) & np.isfinite(g) & np.isfinite(j))
        lp = L * _L_SCALE + _L_OFFSET

        if opts.cubic_solver is CubicSolver.NEWTON:
            t, _ = solve_t_newton_batch(lp, opts)
            failed |= ~np.isfinite(t)
        else:
            t, disc = _cardano_terms(lp)
            failed |= ~(disc > 0.0) | ~np.isfinite(t)

        y0 = t * t * t
        chroma_norm = lp / (_DIV * (t - _SHIFT))
        a = g / chroma_norm
        b = j / chroma_norm
        failed |= np.abs(t - _SHIFT) < 1e-14
        failed |= (chroma_norm == 0.0) | ~np.isfinite(chroma_norm)
        failed |= ~np.isfinite(a) | ~np.isfinite(b)

        a = np.where(failed, 0.0, a)
        b = np.where(failed, 0.0, b)
        y0 = np.where(failed, 1.0, y0)

        c3, c2, c1, c0 = _sum_zero_coeffs(a, b)
        z_floor = _largest_real_root_cubic(c3, c2, c1, c0)
        w = np.where(
            _W0 > z_floor, _W0, z_floor + np.maximum(1.0, 0.1 * np.abs(z_floor))
        )

        tol = opts.newton_tol * np.maximum(1.0, y0)

        out_X = np.full(n, np.nan)
        out_Y = np.full(n, np.nan)
        out_Z = np.full(n, np.nan)

        terms = _phi_terms(w, a, b, y0)
        phi_c = terms.phi
        scale = np.maximum(np.abs(terms.X), np.maximum(np.abs(terms.Y), np.abs(terms.Z)))
        singular = np.abs(terms.S) < _SINGULARITY_RTOL * scale
        failed |= ~failed & (singular | ~np.isfinite(phi_c))

        active = ~failed
        stalled = np.zeros(n, dtype=bool)
        max_it = 0

        done = active & (np.abs(phi_c) <= tol)
        for idx in (done,):
            out_X[idx] = terms.X[idx]
            out_Y[idx] = terms.Y[idx]
            out_Z[idx] = terms.Z[idx]
        active &= ~done

        for it in range(opts.max_iter):
            if not active.any():
                break
            max_it = it + 1

            dphi = _dphi_terms(terms)
            broken = active & ((dphi == 0.0) | ~np.isfinite(dphi))
            failed |= broken
            active &= ~broken

            step = np.where(active, phi_c / np.where(dphi == 0.0, 1.0, dphi), 0.0)

            pending = active.copy()
            accepted = np.zeros(n, dtype=bool)
            for _ in range(_MAX_HALVINGS + 1):
                if not pending.any():
                    break
                w_t = np.where(pending, w - step, w)
                trial = _phi_terms(w_t, a, b, y0)
                ok = (
                    pending
                    & (w_t > z_floor)
                    & (trial.S > 0.0)
                    & np.isfinite(trial.phi)
                    & (np.abs(trial.phi) < np.abs(phi_c))
                )
                w = np.where(ok, w_t, w)
                accepted |= ok
                pending &= ~ok
                step = np.where(pending, 0.5 * step, step)

            failed |= pending
            active &= ~pending

            stalled = accepted & (np.abs(step) < _STEP_FLOOR * np.abs(w))

            terms = _phi_terms(w, a, b, y0)
            phi_c = terms.phi

            done = active & (np.abs(phi_c) <= tol)
            out_X[done] = terms.X[done]
            out_Y[done] = terms.Y[done]
            out_Z[done] = terms.Z[done]
            active &= ~done

            gave_up = active & stalled
            failed |= gave_up
            active &= ~gave_up

        failed |= active  # iteration budget exhausted

    out0[...] = np.where(failed, np.nan, out_X)
    out1[...] = np.where(failed, np.nan, out_Y)
    out2[...] = np.where(failed, np.nan, out_Z)
    fail_out[...] = failed
    return max_it


# ---------------------------------------------------------------------------
# Chunk scheduling
# ---------------------------------------------------------------------------

def _run_chunked(kernel, inputs, n, workers, *kernel_args) -> tuple:
    out0 = np.empty(n)
    out1 = np.empty(n)
    out2 = np.empty(n)
    failed = np.zeros(n, dtype=bool)

    spans = [(lo, min(lo + _CHUNK, n)) for lo in range(0, n, _CHUNK)]

    def run_span(span) -> int:
        lo, hi = span
        return kernel(
            *(arr[lo:hi] for arr in inputs),
            out0[lo:hi],
            out1[lo:hi],
            out2[lo:hi],
            failed[lo:hi],
            *kernel_args,
        )

    if workers is not None and workers > 1 and n >= _THREAD_THRESHOLD:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            max_it = max(pool.map(run_span, spans), default=0)
    else:
        max_it = 0
        for span in spans:
            max_it = max(max_it, run_span(span))
    return out0, out1, out2, failed, max_it


def _finish(batch: ColorBatch, out0, out1, out2, failed, max_it, t_start) -> tuple:
    if batch.valid is not None:
        invalid = ~batch.valid
        failed = failed | invalid
        out0 = np.where(invalid, np.nan, out0)
        out1 = np.where(invalid, np.nan, out1)
        out2 = np.where(invalid, np.nan, out2)
    failed_indices = np.flatnonzero(failed).astype(np.int64)
    report = BatchReport(
        converged=int(len(batch) - failed_indices.size),
        failed_indices=failed_indices,
        max_iterations_used=int(max_it),
        wall_time=time.perf_counter() - t_start,
    )
    return ColorBatch(out0, out1, out2, valid=~failed), report


def batch_xyz_to_lgj(
    batch: ColorBatch,
    workers: Optional[int] = None,
) -> ColorBatch:
    """Convert a batch of XYZ rows to Lgj.

    Lanes with a nonpositive tristimulus sum, nonpositive modified
    luminance, or non-finite values come back NaN with ``valid`` False;
    everything else matches the scalar forward conversion to within a
    couple of ulp.  The closed-form forward direction needs no solver
    options and no iteration report — failures are fully described by the
    output's ``valid`` mask.
    """
    t_start = time.perf_counter()
    out = _run_chunked(_forward_chunk, (batch.c0, batch.c1, batch.c2), len(batch), workers)
    converted, _ = _finish(batch, *out, t_start)
    return converted


def batch_lgj_to_xyz(
    batch: ColorBatch,
    opts: Optional[SolveOptions] = None,
    workers: Optional[int] = None,
) -> tuple:
    """Convert a batch of Lgj rows back to XYZ.

    Masked array-wide Newton iteration sharing the scalar solver's literal
    arithmetic and safeguards; converged lanes freeze while the rest keep
    iterating, and failed lanes (no preimage, stall, or iteration budget)
    come back NaN without disturbing the others.  Returns the converted
    batch (``valid`` False on failed lanes) and a ``BatchReport``.
    """
    if opts is None:
        opts = SolveOptions()
    t_start = time.perf_counter()
    out = _run_chunked(
        _inverse_chunk, (batch.c0, batch.c1, batch.c2), len(batch), workers, opts
    )
    return _finish(batch, *out, t_start)
