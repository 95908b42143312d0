"""Optional matplotlib renderings to complement the deterministic exports.

The SVG/CSV exports in :mod:`lexmatch.spatial` are the byte-stable artifacts;
these figures are for eyeballing results (PNG/PDF via Agg, no display
needed): a territory scatter for any spatial instance, grid or not, and
sorted utility profiles for comparing allocations.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .core import NEG_INF, Instance, Allocation, realized_utilities
from .spatial import PALETTE, SpatialInstance

__all__ = ["territory_figure", "utility_profile_figure", "save_figure"]


def territory_figure(spatial: SpatialInstance, allocation: Allocation):
    """Students as dots colored by assigned school (grey when unassigned),
    schools as black markers."""
    fig, ax = plt.subplots(figsize=(6, 6))
    colors = [
        "#bbbbbb" if j is None else PALETTE[j % len(PALETTE)]
        for j in allocation.assignment
    ]
    xs = [p[0] for p in spatial.student_points]
    ys = [p[1] for p in spatial.student_points]
    size = max(4.0, 4000.0 / max(len(xs), 1))
    ax.scatter(xs, ys, c=colors, s=size, marker="s", linewidths=0)
    ax.scatter(
        [p[0] for p in spatial.school_points],
        [p[1] for p in spatial.school_points],
        c="black",
        s=40,
        zorder=3,
    )
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.set_aspect("equal")
    ax.set_xticks([])
    ax.set_yticks([])
    fig.tight_layout()
    return fig


def utility_profile_figure(instance: Instance, allocations: dict[str, Allocation]):
    """Ascending-sorted utility per student rank, one line per allocation.

    Unassigned students are drawn at zero with a marker so scarcity is
    visible without faking a finite utility for them.
    """
    fig, ax = plt.subplots(figsize=(7, 4))
    for label, allocation in allocations.items():
        vector = realized_utilities(instance, allocation).sorted_ascending()
        ranks = range(len(vector))
        ys = [0.0 if u is NEG_INF else u for u in vector]
        ax.plot(ranks, ys, label=label, linewidth=1.5)
        gaps = [k for k, u in enumerate(vector) if u is NEG_INF]
        if gaps:
            ax.plot(gaps, [0.0] * len(gaps), "x", color="red", markersize=4)
    ax.set_xlabel("student rank (worst first)")
    ax.set_ylabel("utility")
    ax.legend()
    fig.tight_layout()
    return fig


def save_figure(fig, path: str, dpi: int = 150) -> None:
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
