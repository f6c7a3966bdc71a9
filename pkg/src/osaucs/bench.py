"""Throughput measurements emitted as line-delimited JSON records.

Two benchmark kinds:

* ``inverse_batch`` — wall time of the batch inverse over n in-gamut
  colors, with the per-element cost expressed as a ratio to ``np.cbrt``
  over a same-length array (the cheapest comparable elementwise
  operation, used as a machine-independent yardstick);
* ``cubic_solver`` — closed-form (Cardano) versus Newton solve times for
  the lightness cubic over n lightness values.

Every record carries the same six keys; fields that do not apply to a
kind are null.  The report is plain data for external tools; rendering to
a PNG is a separate opt-in step.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .batch import (
    ColorBatch,
    batch_lgj_to_xyz,
    solve_t_cardano_batch,
    solve_t_newton_batch,
    batch_xyz_to_lgj,
)
from .core import SolveOptions
from .inverse import lprime_from_l

__all__ = [
    "BenchRecord",
    "DEFAULT_SIZES",
    "make_ingamut_lgj",
    "run_inverse_bench",
    "run_cubic_bench",
    "run_all",
]

DEFAULT_SIZES = tuple(2 ** k for k in range(0, 23))

_RECORD_KEYS = (
    "kind",
    "size",
    "seconds",
    "ratio_to_cbrt",
    "cubic_cardano_seconds",
    "cubic_newton_seconds",
)


@dataclass(frozen=True)
class BenchRecord:
    """One benchmark measurement; serializes to one JSON line."""

    kind: str
    size: int
    seconds: float
    ratio_to_cbrt: Optional[float] = None
    cubic_cardano_seconds: Optional[float] = None
    cubic_newton_seconds: Optional[float] = None

    def to_json(self) -> str:
        payload = {key: getattr(self, key) for key in _RECORD_KEYS}
        return json.dumps(payload)


def _best_time(fn, repeats: int) -> float:
    """Minimum wall time of ``fn()`` over ``repeats`` runs (min of >= 1)."""
    best = float("inf")
    for _ in range(max(1, repeats)):
        t0 = time.perf_counter()
        fn()
        dt = time.perf_counter() - t0
        best = min(best, dt)
    return best


def make_ingamut_lgj(n: int, seed: int) -> ColorBatch:
    """In-gamut Lgj batch: forward conversion of uniform XYZ in [1, 100]^3."""
    rng = np.random.default_rng(seed)
    xyz = ColorBatch(
        rng.uniform(1.0, 100.0, n),
        rng.uniform(1.0, 100.0, n),
        rng.uniform(1.0, 100.0, n),
    )
    lgj = batch_xyz_to_lgj(xyz)
    bad = int((~lgj.valid).sum())
    if bad:
        raise RuntimeError(
            f"forward conversion of the benchmark corpus failed for"
            f" {bad} of {n} colors"
        )
    return ColorBatch(lgj.c0, lgj.c1, lgj.c2)


def run_inverse_bench(
    sizes,
    repeats: int = 1,
    seed: int = 0,
    opts: Optional[SolveOptions] = None,
    workers: Optional[int] = None,
) -> list:
    """Time the batch inverse per size; one ``inverse_batch`` record each."""
    records = []
    for n in sizes:
        batch = make_ingamut_lgj(int(n), seed)
        seconds = _best_time(lambda: batch_lgj_to_xyz(batch, opts, workers), repeats)
        cbrt_input = np.abs(batch.c0) + 1.0
        cbrt_out = np.empty_like(cbrt_input)
        cbrt_seconds = _best_time(lambda: np.cbrt(cbrt_input, out=cbrt_out), repeats)
        ratio = seconds / cbrt_seconds if cbrt_seconds > 0.0 else None
        records.append(
            BenchRecord(
                kind="inverse_batch",
                size=int(n),
                seconds=seconds,
                ratio_to_cbrt=ratio,
            )
        )
    return records


def run_cubic_bench(sizes, repeats: int = 1, seed: int = 0) -> list:
    """Time both lightness-cubic solvers per size; one ``cubic_solver`` record each."""
    records = []
    rng = np.random.default_rng(seed)
    for n in sizes:
        L = rng.uniform(0.0, 75.0, int(n))
        lp = np.asarray(lprime_from_l(L), dtype=np.float64)
        cardano_s = _best_time(lambda: solve_t_cardano_batch(lp), repeats)
        newton_s = _best_time(lambda: solve_t_newton_batch(lp), repeats)
        records.append(
            BenchRecord(
                kind="cubic_solver",
                size=int(n),
                seconds=cardano_s,
                cubic_cardano_seconds=cardano_s,
                cubic_newton_seconds=newton_s,
            )
        )
    return records


def run_all(
    sizes=DEFAULT_SIZES,
    repeats: int = 1,
    seed: int = 0,
    opts: Optional[SolveOptions] = None,
    workers: Optional[int] = None,
) -> list:
    """Both benchmark kinds over the same size ladder."""
    records = run_inverse_bench(sizes, repeats, seed, opts, workers)
    records.extend(run_cubic_bench(sizes, repeats, seed))
    return records
