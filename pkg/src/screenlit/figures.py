"""Matplotlib figure renderers for the CLI report path.

Figures are written next to the delimited output when the CLI is given
--plot-dir; nothing here is interactive, the Agg backend renders straight
to files.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .report import LostEvidenceSummary
from .resampling import SubsampleDistribution


def plot_lost_evidence(
    summaries: list[LostEvidenceSummary], path: str | Path
) -> Path:
    """Point-and-range chart: median lost evidence per model, min/max whiskers."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(max(4.0, 1.1 * len(summaries) + 2.0), 4.0))
    labels = []
    for x, summary in enumerate(summaries):
        labels.append(summary.model)
        if summary.median is None:
            continue
        ax.vlines(x, summary.min, summary.max, color="steelblue", linewidth=1.8)
        ax.plot([x], [summary.median], marker="o", color="crimson", zorder=3)
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=30, ha="right")
    ax.set_ylim(-0.02, 1.02)
    ax.set_ylabel("Lost evidence (1 - recall)")
    ax.set_title("Lost evidence per model (median, min/max range)")
    ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_subsample_stability(
    distributions: list[SubsampleDistribution], metric: str, path: str | Path
) -> Path:
    """Stability chart: per-size median with quantile bands over subsample size."""
    path = Path(path)
    sizes = [d.size for d in distributions]

    def series(stat: str) -> list[float]:
        return [getattr(d, stat) for d in distributions]

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.fill_between(sizes, series("q05"), series("q95"), alpha=0.18,
                    color="steelblue", label="5th to 95th percentile")
    ax.fill_between(sizes, series("q25"), series("q75"), alpha=0.35,
                    color="steelblue", label="25th to 75th percentile")
    ax.plot(sizes, series("median"), marker="o", color="crimson", label="median")
    ax.set_xlabel("subsample size")
    ax.set_ylabel(metric)
    ax.set_title(f"Subsampling stability of {metric}")
    undefined = [d.undefined_fraction for d in distributions]
    if any(f > 0 for f in undefined if not math.isnan(f)):
        worst = max(undefined)
        ax.annotate(
            f"undefined draws excluded (up to {worst:.1%})",
            xy=(0.02, 0.02), xycoords="axes fraction", fontsize=8, color="dimgray",
        )
    ax.legend(loc="best", fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
