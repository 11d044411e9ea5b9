"""Figure rendering for experiment reports.

Two views per metric: the average-rank bar chart across methods and a
dataset x method heatmap of metric means.  Files land next to the
delimited output as PNGs.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .metrics import METRIC_DIRECTIONS


def _rank_bars(metric: str, d: str, info: dict, path: Path) -> None:
    methods = info["methods"]
    ranks = info["average_rank"]
    fig, ax = plt.subplots(figsize=(max(4.0, 1.1 * len(methods)), 3.2))
    positions = np.arange(len(methods))
    ax.bar(positions, ranks, color="#4878a8")
    ax.set_xticks(positions)
    ax.set_xticklabels(methods, rotation=30, ha="right")
    ax.set_ylabel("average rank (lower is better)")
    ax.set_title(f"{metric}, d={d}")
    for x, r in zip(positions, ranks):
        ax.text(x, r, f"{r:.2f}", ha="center", va="bottom", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _mean_heatmap(metric: str, d: str, report: dict, methods: list[str], path: Path) -> None:
    agg = report["aggregates"]
    datasets = [entry["name"] for entry in report["datasets"]]
    table = np.array(
        [[agg[ds][m][d]["metrics"][metric]["mean"] for m in methods] for ds in datasets]
    )
    fig, ax = plt.subplots(
        figsize=(max(4.0, 1.0 * len(methods)), max(2.5, 0.45 * len(datasets) + 1.2))
    )
    cmap = "viridis" if METRIC_DIRECTIONS[metric] else "viridis_r"
    image = ax.imshow(table, aspect="auto", cmap=cmap)
    ax.set_xticks(np.arange(len(methods)))
    ax.set_xticklabels(methods, rotation=30, ha="right")
    ax.set_yticks(np.arange(len(datasets)))
    ax.set_yticklabels(datasets)
    for i in range(len(datasets)):
        for j in range(len(methods)):
            ax.text(j, i, f"{table[i, j]:.3f}", ha="center", va="center",
                    fontsize=7, color="white")
    ax.set_title(f"{metric} mean, d={d} (brighter = better)")
    fig.colorbar(image, ax=ax, shrink=0.8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_report_figures(report: dict, out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    for metric, by_d in sorted(report["rank_tables"].items()):
        for d, info in sorted(by_d.items(), key=lambda kv: int(kv[0])):
            rank_path = out / f"avg_rank_{metric}_d{d}.png"
            _rank_bars(metric, d, info, rank_path)
            written.append(rank_path)
            heat_path = out / f"means_{metric}_d{d}.png"
            _mean_heatmap(metric, d, report, info["methods"], heat_path)
            written.append(heat_path)
    return written
