"""Report figures rendered straight to PNG files.

Uses the Agg backend so no display is needed. The PNG metadata drops the
library version stamp and carries the config hash instead, keeping reruns
byte-identical for identical configurations.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .evaluate import MetricReport, SweepResult


def _save(fig, path: str | Path, config_hash: str | None) -> None:
    metadata: dict[str, str | None] = {"Software": None}
    if config_hash:
        metadata["Description"] = f"config_hash={config_hash}"
    fig.savefig(path, format="png", dpi=120, metadata=metadata)
    plt.close(fig)


def plot_metric_bars(
    reports: Mapping[str, MetricReport],
    path: str | Path,
    config_hash: str | None = None,
) -> None:
    """Grouped bars: one cluster per metric, one bar per model."""
    tags = list(reports)
    metric_values = {
        "P@5": [reports[t].mean_precision_at_5 for t in tags],
        "nDCG@5": [reports[t].mean_ndcg_at_5 for t in tags],
        "MRR": [reports[t].mean_reciprocal_rank for t in tags],
    }
    x = np.arange(len(metric_values))
    width = 0.8 / max(len(tags), 1)
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    for i, tag in enumerate(tags):
        values = [metric_values[m][i] for m in metric_values]
        bars = ax.bar(x + i * width, values, width, label=tag)
        ax.bar_label(bars, fmt="%.3f", fontsize=7)
    ax.set_xticks(x + (len(tags) - 1) * width / 2.0)
    ax.set_xticklabels(list(metric_values))
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("score")
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path, config_hash)


def plot_sweep_curves(
    results: Sequence[SweepResult],
    path: str | Path,
    config_hash: str | None = None,
) -> None:
    """One nDCG@5 curve per criterion over the swept k values."""
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    for result in results:
        ks = [p.k for p in result.points]
        values = [p.mean_ndcg_at_5 for p in result.points]
        ax.plot(ks, values, marker="o", label=result.config.criterion)
    axis = results[0].config.axis if results else ""
    ax.set_xlabel(f"k ({axis} kept)")
    ax.set_ylabel("nDCG@5")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path, config_hash)
