"""Deterministic static SVG line charts."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
           "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")

_RC = {
    "svg.hashsalt": "marginbound",
    "svg.fonttype": "none",
    "font.family": "DejaVu Sans",
    "path.simplify": False,
}


def line_chart(x, series: dict, path, xlabel: str = "", ylabel: str = "", title: str = "") -> Path:
    """One polyline per entry of ``series``, colours fixed by insertion order.

    Non-finite values are left out of their line.  Identical input gives a
    byte-identical file.
    """
    x = np.asarray(x, dtype=float)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6.4, 4.0))
        for i, (name, y) in enumerate(series.items()):
            y = np.asarray(y, dtype=float)
            if y.shape != x.shape:
                raise ValueError(f"series {name!r} has {y.size} points, x has {x.size}")
            ax.plot(x, np.where(np.isfinite(y), y, np.nan), label=name,
                    color=PALETTE[i % len(PALETTE)], linewidth=1.2)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        if series:
            ax.legend(fontsize=7, loc="best")
        fig.tight_layout()
        path = Path(path)
        fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
        plt.close(fig)
    return path
