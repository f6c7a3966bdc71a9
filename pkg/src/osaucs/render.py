"""Optional matplotlib rendering of curve tables and benchmark reports.

Rendering is opt-in (the ``--plot`` CLI flag); the delimited tables remain
the primary report format.  Uses the Agg canvas directly so no interactive
backend or global pyplot state is involved.
"""

from __future__ import annotations

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from .figures import CurveTable

__all__ = ["render_curve", "render_bench"]


def _new_axes(title: str, xlabel: str, ylabel: str):
    fig = Figure(figsize=(7.0, 5.0), dpi=120)
    FigureCanvasAgg(fig)
    ax = fig.add_subplot()
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    return fig, ax


def render_curve(
    table: CurveTable, path: str, title: str, xlabel: str, ylabel: str
) -> None:
    """Render one curve table to an image file (NaN values break the line).

    Curves with a pole swing far beyond their interesting range near it;
    the vertical limits are clamped to a robust envelope of the sampled
    values so the structure away from the pole stays visible.
    """
    fig, ax = _new_axes(title, xlabel, ylabel)
    y = np.where(table.gap, np.nan, table.y)
    ax.axhline(0.0, color="0.5", linewidth=0.8)
    ax.plot(table.x, y, linewidth=1.5)

    finite = np.isfinite(y)
    if finite.any():
        mags = np.abs(y[finite])
        cap = 1.5 * float(np.percentile(mags, 95.0))
        peak = float(mags.max())
        if cap > 0.0 and peak > 3.0 * cap:
            ax.set_ylim(-cap, cap)
    fig.savefig(path, bbox_inches="tight")


def render_bench(records, path: str) -> None:
    """Render benchmark records (both kinds) as log-log time-versus-size lines."""
    fig, ax = _new_axes("throughput", "batch size", "seconds")

    def series(kind: str, attr: str):
        pts = [(r.size, getattr(r, attr)) for r in records if r.kind == kind]
        pts = [(s, v) for s, v in pts if v is not None and v > 0.0]
        pts.sort()
        return [p[0] for p in pts], [p[1] for p in pts]

    for kind, attr, label in (
        ("inverse_batch", "seconds", "batch inverse"),
        ("cubic_solver", "cubic_cardano_seconds", "cubic: closed form"),
        ("cubic_solver", "cubic_newton_seconds", "cubic: newton"),
    ):
        xs, ys = series(kind, attr)
        if xs:
            ax.loglog(xs, ys, marker="o", markersize=3, linewidth=1.2, label=label)
    ax.legend()
    fig.savefig(path, bbox_inches="tight")
