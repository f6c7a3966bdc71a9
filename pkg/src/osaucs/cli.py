"""Command-line interface.

Four subcommands:

* ``convert`` — stream XYZ or Lgj rows through the batch engine;
* ``roundtrip`` — forward-then-inverse self-check with a pass/fail gate;
* ``bench`` — throughput report as line-delimited JSON;
* ``figure`` — sampled diagnostic curves as delimited tables.

Exit codes: 0 on success, 1 when conversions fail or the round-trip gate
is exceeded, 2 on usage errors or malformed input.

Delimited input accepts comma- or whitespace-separated columns with an
optional header row; output uses shortest round-trip float formatting.
When some rows fail, a ``status`` column (``ok``/``failed``) is appended
and failed rows carry NaN components, so the good rows stay usable.

Plot rendering is opt-in via ``--plot`` on ``bench`` and ``figure``: the
delimited report stays the primary output, and a PNG is written next to
it.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .batch import ColorBatch, batch_lgj_to_xyz, batch_xyz_to_lgj
from .bench import DEFAULT_SIZES, run_all
from .core import CubicSolver, LgjColor, SolveOptions, XyzColor
from .errors import DegenerateInput, NumericalFailure
from .figures import CurveTable, sample_f_curve, sample_phi_curve
from .forward import xyz_to_lgj
from .inverse import lprime_from_l

__all__ = [
    "JobConfig",
    "cmd_convert",
    "cmd_roundtrip",
    "cmd_bench",
    "cmd_figure",
    "build_parser",
    "main",
]

_ROUNDTRIP_GATE = 1e-8

_FORWARD_IN = ("X", "Y", "Z")
_FORWARD_OUT = ("L", "g", "j")


class _UsageError(Exception):
    """Malformed input or an invalid flag combination (exit code 2)."""


@dataclass(frozen=True)
class JobConfig:
    """Resolved settings of one CLI job, independent of argparse."""

    command: str
    direction: str = "forward"
    input_path: Optional[str] = None
    output_path: str = "-"
    fmt: str = "csv"
    tol: float = 1e-12
    max_iter: int = 100
    solver: str = "cardano"
    workers: Optional[int] = None
    sizes: tuple = field(default=DEFAULT_SIZES)
    repeats: int = 1
    seed: int = 0
    count: int = 1000
    curve: str = "phi"
    lprime: Optional[float] = None
    xyz: Optional[tuple] = None
    lgj: Optional[tuple] = None
    grid: Optional[tuple] = None
    points: Optional[int] = None
    plot: bool = False

    def solve_options(self) -> SolveOptions:
        return SolveOptions(
            cubic_solver=CubicSolver(self.solver),
            newton_tol=self.tol,
            max_iter=self.max_iter,
        )


# ---------------------------------------------------------------------------
# Formatting and I/O helpers
# ---------------------------------------------------------------------------

def _fmt(v: float) -> str:
    return repr(float(v))


def _parse_triple(text: str, flag: str) -> tuple:
    parts = [p for p in text.replace(",", " ").split() if p]
    if len(parts) != 3:
        raise _UsageError(f"{flag} expects three comma-separated numbers, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise _UsageError(f"{flag}: {exc}") from None


def _open_in(path: Optional[str]):
    if path is None or path == "-":
        return sys.stdin, False
    try:
        return open(path, "r", encoding="utf-8"), True
    except OSError as exc:
        raise _UsageError(f"cannot read {path!r}: {exc}") from None


def _open_out(path: str):
    if path == "-":
        return sys.stdout, False
    try:
        return open(path, "w", encoding="utf-8"), True
    except OSError as exc:
        raise _UsageError(f"cannot write {path!r}: {exc}") from None


def _split_row(line: str) -> list:
    if "," in line:
        return [p.strip() for p in line.split(",")]
    return line.split()


def _read_rows_csv(stream) -> tuple:
    """Parse delimited rows of three numbers; returns ``(rows, had_header)``."""
    rows = []
    had_header = False
    row_number = 0
    for raw in stream:
        line = raw.strip()
        if not line:
            continue
        row_number += 1
        parts = _split_row(line)
        if row_number == 1:
            try:
                rows.append([float(p) for p in parts])
                if len(parts) != 3:
                    raise _UsageError(
                        f"row 1 has {len(parts)} columns, expected 3: {line!r}"
                    )
                continue
            except ValueError:
                had_header = True
                continue
        if len(parts) != 3:
            raise _UsageError(f"row {row_number} has {len(parts)} columns, expected 3: {line!r}")
        try:
            rows.append([float(p) for p in parts])
        except ValueError:
            raise _UsageError(f"row {row_number} is not numeric: {line!r}") from None
    return rows, had_header


def _read_rows_jsonl(stream, keys) -> tuple:
    rows = []
    for number, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise _UsageError(f"line {number} is not valid JSON: {exc}") from None
        if not isinstance(obj, dict):
            raise _UsageError(f"line {number} is not a JSON object")
        try:
            rows.append([float(obj[k]) for k in keys])
        except (KeyError, TypeError, ValueError):
            raise _UsageError(
                f"line {number} must carry numeric fields {', '.join(keys)}"
            ) from None
    return rows, False


def _write_rows_csv(stream, rows, keys, status, had_header) -> None:
    n = len(rows)
    if had_header or n >= 1:
        header = ",".join(keys)
        if status is not None:
            header += ",status"
        stream.write(header + "\n")
    for i, row in enumerate(rows):
        line = ",".join(_fmt(v) for v in row)
        if status is not None:
            line += "," + status[i]
        stream.write(line + "\n")


def _write_rows_jsonl(stream, rows, keys, status) -> None:
    for i, row in enumerate(rows):
        obj = {k: float(v) for k, v in zip(keys, row)}
        if status is not None:
            obj["status"] = status[i]
        stream.write(json.dumps(obj) + "\n")


def _plot_path(output_path: str) -> str:
    if output_path == "-":
        raise _UsageError("--plot needs --output pointing at a file, not stdout")
    stem, dot, ext = output_path.rpartition(".")
    if dot and "/" not in ext:
        return stem + ".png"
    return output_path + ".png"


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_convert(cfg: JobConfig) -> int:
    forward = cfg.direction == "forward"
    in_keys = _FORWARD_IN if forward else _FORWARD_OUT
    out_keys = _FORWARD_OUT if forward else _FORWARD_IN

    stream, close_in = _open_in(cfg.input_path)
    try:
        if cfg.fmt == "jsonl":
            rows, had_header = _read_rows_jsonl(stream, in_keys)
        else:
            rows, had_header = _read_rows_csv(stream)
    finally:
        if close_in:
            stream.close()

    arr = np.asarray(rows, dtype=np.float64).reshape(len(rows), 3)
    batch = ColorBatch(arr[:, 0], arr[:, 1], arr[:, 2])
    if forward:
        result = batch_xyz_to_lgj(batch, workers=cfg.workers)
        failed = ~result.valid
    else:
        result, report = batch_lgj_to_xyz(batch, cfg.solve_options(), workers=cfg.workers)
        failed = np.zeros(len(batch), dtype=bool)
        failed[report.failed_indices] = True

    n_failed = int(failed.sum())
    status = None
    if n_failed:
        status = ["failed" if f else "ok" for f in failed]

    out_rows = result.to_rows()
    out, close_out = _open_out(cfg.output_path)
    try:
        if cfg.fmt == "jsonl":
            _write_rows_jsonl(out, out_rows, out_keys, status)
        else:
            _write_rows_csv(out, out_rows, out_keys, status, had_header)
    finally:
        if close_out:
            out.close()

    if n_failed:
        print(
            f"{n_failed} of {len(batch)} rows failed to convert",
            file=sys.stderr,
        )
        return 1
    return 0


def cmd_roundtrip(cfg: JobConfig) -> int:
    if cfg.input_path is not None:
        stream, close_in = _open_in(cfg.input_path)
        try:
            if cfg.fmt == "jsonl":
                rows, _ = _read_rows_jsonl(stream, _FORWARD_IN)
            else:
                rows, _ = _read_rows_csv(stream)
        finally:
            if close_in:
                stream.close()
        arr = np.asarray(rows, dtype=np.float64).reshape(len(rows), 3)
    else:
        rng = np.random.default_rng(cfg.seed)
        arr = rng.uniform(1.0, 100.0, (cfg.count, 3))

    xyz = ColorBatch(arr[:, 0], arr[:, 1], arr[:, 2])
    opts = cfg.solve_options()
    lgj = batch_xyz_to_lgj(xyz, workers=cfg.workers)
    back, inv_report = batch_lgj_to_xyz(lgj, opts, workers=cfg.workers)

    failed = ~lgj.valid
    failed[inv_report.failed_indices] = True
    failures = int(failed.sum())
    diff = np.abs(back.to_rows() - arr)
    finite = np.isfinite(diff)
    max_error = float(diff[finite].max()) if finite.any() else 0.0

    ok = failures == 0 and max_error < _ROUNDTRIP_GATE
    out, close_out = _open_out(cfg.output_path)
    try:
        out.write(
            f"rows={len(xyz)} failures={failures} max_error={_fmt(max_error)}"
            f" gate={_fmt(_ROUNDTRIP_GATE)} result={'pass' if ok else 'fail'}\n"
        )
    finally:
        if close_out:
            out.close()
    return 0 if ok else 1


def cmd_bench(cfg: JobConfig) -> int:
    records = run_all(
        sizes=cfg.sizes,
        repeats=cfg.repeats,
        seed=cfg.seed,
        opts=cfg.solve_options(),
        workers=cfg.workers,
    )
    out, close_out = _open_out(cfg.output_path)
    try:
        for record in records:
            out.write(record.to_json() + "\n")
    finally:
        if close_out:
            out.close()
    if cfg.plot:
        from .render import render_bench

        render_bench(records, _plot_path(cfg.output_path))
    return 0


def _figure_table(cfg: JobConfig) -> tuple:
    if cfg.curve == "f":
        if cfg.lprime is not None:
            lp = cfg.lprime
        elif cfg.lgj is not None:
            lp = float(lprime_from_l(cfg.lgj[0]))
        elif cfg.xyz is not None:
            lp = float(lprime_from_l(xyz_to_lgj(XyzColor(*cfg.xyz)).L))
        else:
            lp = 25.0
        lo, hi = cfg.grid if cfg.grid is not None else (4.0, 6.0)
        n = cfg.points if cfg.points is not None else 101
        return sample_f_curve(lp, lo, hi, n), ("t", "f")

    if cfg.lgj is not None:
        color = LgjColor(*cfg.lgj)
    else:
        xyz = cfg.xyz if cfg.xyz is not None else (12.0, 67.0, 20.0)
        color = xyz_to_lgj(XyzColor(*xyz))
    lo, hi = cfg.grid if cfg.grid is not None else (-1.0, 5.0)
    n = cfg.points if cfg.points is not None else 100
    return sample_phi_curve(color, lo, hi, n), ("w", "phi")


def cmd_figure(cfg: JobConfig) -> int:
    table, (x_key, y_key) = _figure_table(cfg)

    out, close_out = _open_out(cfg.output_path)
    try:
        if cfg.fmt == "jsonl":
            for i in range(len(table)):
                out.write(
                    json.dumps(
                        {
                            x_key: float(table.x[i]),
                            y_key: float(table.y[i]),
                            "gap": bool(table.gap[i]),
                        }
                    )
                    + "\n"
                )
        else:
            out.write(f"{x_key},{y_key},gap\n")
            for i in range(len(table)):
                out.write(
                    f"{_fmt(table.x[i])},{_fmt(table.y[i])},{int(table.gap[i])}\n"
                )
    finally:
        if close_out:
            out.close()

    if cfg.plot:
        from .render import render_curve

        render_curve(
            table,
            _plot_path(cfg.output_path),
            title=f"{y_key}({x_key})",
            xlabel=x_key,
            ylabel=y_key,
        )
    return 0


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _add_io_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", default=None, help="input file ('-' for stdin)")
    p.add_argument("--output", default="-", help="output file ('-' for stdout)")
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv")


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, default=1e-12, help="Newton residual tolerance")
    p.add_argument("--max-iter", type=int, default=100, help="Newton iteration budget")
    p.add_argument(
        "--solver",
        choices=("cardano", "newton"),
        default="cardano",
        help="lightness-cubic solver",
    )
    p.add_argument(
        "--workers",
        type=int,
        default=None,
        help="thread count for very large batches (default: sequential)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="osaucs",
        description="Convert colors between CIEXYZ and the OSA-UCS Lgj space.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="convert a table of colors")
    p.add_argument(
        "--direction",
        choices=("forward", "inverse"),
        default="forward",
        help="forward: XYZ rows to Lgj; inverse: Lgj rows to XYZ",
    )
    _add_io_flags(p)
    _add_solver_flags(p)

    p = sub.add_parser("roundtrip", help="forward-then-inverse self check")
    _add_io_flags(p)
    _add_solver_flags(p)
    p.add_argument("--count", type=int, default=1000, help="random colors when no --input")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("bench", help="throughput report (JSON lines)")
    p.add_argument("--sizes", default=None, help="comma-separated batch sizes")
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", default="-")
    p.add_argument("--plot", action="store_true", help="also render a PNG next to the report")
    _add_solver_flags(p)

    p = sub.add_parser("figure", help="sampled diagnostic curves")
    p.add_argument("--curve", choices=("f", "phi"), required=True)
    p.add_argument("--lprime", type=float, default=None, help="lightness for the f curve")
    p.add_argument("--xyz", default=None, help="color as 'X,Y,Z' (converted forward first)")
    p.add_argument("--lgj", default=None, help="color as 'L,g,j'")
    p.add_argument("--range", dest="grid", nargs=2, type=float, default=None, metavar=("MIN", "MAX"))
    p.add_argument("--points", type=int, default=None)
    p.add_argument("--output", default="-")
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    p.add_argument("--plot", action="store_true", help="also render a PNG next to the table")

    return parser


def _config_from_args(args: argparse.Namespace) -> JobConfig:
    sizes = DEFAULT_SIZES
    if getattr(args, "sizes", None):
        try:
            sizes = tuple(int(s) for s in args.sizes.split(",") if s.strip())
        except ValueError:
            raise _UsageError(f"--sizes must be comma-separated integers, got {args.sizes!r}")
        if not sizes or any(s < 0 for s in sizes):
            raise _UsageError(f"--sizes must be nonnegative integers, got {args.sizes!r}")

    xyz = _parse_triple(args.xyz, "--xyz") if getattr(args, "xyz", None) else None
    lgj = _parse_triple(args.lgj, "--lgj") if getattr(args, "lgj", None) else None

    tol = getattr(args, "tol", 1e-12)
    max_iter = getattr(args, "max_iter", 100)
    if tol <= 0.0:
        raise _UsageError(f"--tol must be positive, got {tol!r}")
    if max_iter < 1:
        raise _UsageError(f"--max-iter must be at least 1, got {max_iter!r}")

    return JobConfig(
        command=args.command,
        direction=getattr(args, "direction", "forward"),
        input_path=getattr(args, "input", None),
        output_path=getattr(args, "output", "-"),
        fmt=getattr(args, "format", "csv"),
        tol=tol,
        max_iter=max_iter,
        solver=getattr(args, "solver", "cardano"),
        workers=getattr(args, "workers", None),
        sizes=sizes,
        repeats=getattr(args, "repeats", 1),
        seed=getattr(args, "seed", 0),
        count=getattr(args, "count", 1000),
        curve=getattr(args, "curve", "phi"),
        lprime=getattr(args, "lprime", None),
        xyz=xyz,
        lgj=lgj,
        grid=tuple(args.grid) if getattr(args, "grid", None) else None,
        points=getattr(args, "points", None),
        plot=getattr(args, "plot", False),
    )


_COMMANDS = {
    "convert": cmd_convert,
    "roundtrip": cmd_roundtrip,
    "bench": cmd_bench,
    "figure": cmd_figure,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        return _COMMANDS[cfg.command](cfg)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DegenerateInput, NumericalFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        return 1
