"""Figure rendering for simulation and profiling reports.

Uses the Agg backend so report generation works headless; figures are
written straight to files next to the delimited output.
"""

from __future__ import annotations

from typing import Iterable, Mapping

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .sc import PROFILE_COLUMNS, TraversalProfile
from .simulator import FerRecord

__all__ = ["render_fer_figure", "render_profile_figure"]

_MARKERS = {"A": "o", "B": "s", "C": "^"}


def render_fer_figure(records: Iterable[FerRecord], path) -> None:
    """Semilog FER-vs-Eb/N0 curves, one line per configuration.

    Points with zero observed errors are left off the log axis.
    """
    by_config: dict[str, list[FerRecord]] = {}
    for rec in records:
        by_config.setdefault(rec.config, []).append(rec)
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for config in sorted(by_config):
        recs = sorted(by_config[config], key=lambda r: r.eb_n0_db)
        xs = [r.eb_n0_db for r in recs if r.frame_errors > 0]
        ys = [r.fer for r in recs if r.frame_errors > 0]
        ax.semilogy(
            xs, ys, marker=_MARKERS.get(config, "x"), label=f"config {config}"
        )
    ax.set_xlabel("Eb/N0 (dB)")
    ax.set_ylabel("frame error rate")
    ax.grid(True, which="both", alpha=0.3)
    if by_config:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_profile_figure(profiles: Mapping[str, TraversalProfile], path) -> None:
    """Grouped bars of node-visit counts per decoder configuration."""
    labels = list(PROFILE_COLUMNS)
    names = list(profiles)
    fig, ax = plt.subplots(figsize=(7.2, 4.2))
    x = np.arange(len(labels), dtype=np.float64)
    width = 0.8 / max(1, len(names))
    for i, name in enumerate(names):
        row = profiles[name].as_row()
        counts = [row[col] for col in labels]
        offset = (i - (len(names) - 1) / 2) * width
        ax.bar(x + offset, counts, width, label=f"{name} (total {row['Total']})")
    ax.set_xticks(x, labels)
    ax.set_ylabel("node visits per frame")
    ax.grid(True, axis="y", alpha=0.3)
    if names:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
