"""Report emitters: JSON (machine-readable), CSV (long form), Markdown tables.

Output is deterministic: keys sorted, floats via repr, no timestamps, so a
report re-emitted from the same run is byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .metrics import METRIC_DIRECTIONS

FORMATS = ("csv", "markdown", "json")


class ReportError(ValueError):
    pass


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, separators=(",", ":")) + "\n"


def report_csv(report: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["dataset", "method", "d", "metric", "mean", "std", "seeds"])
    agg = report["aggregates"]
    for ds in sorted(agg):
        for method in sorted(agg[ds]):
            for d in sorted(agg[ds][method], key=int):
                entry = agg[ds][method][d]
                seeds = ";".join(str(s) for s in entry["seeds"])
                for metric in sorted(entry["metrics"]):
                    stats = entry["metrics"][metric]
                    writer.writerow(
                        [ds, method, d, metric,
                         repr(stats["mean"]), repr(stats["std"]), seeds]
                    )
    return buf.getvalue()


def _best_column(values: list[float], higher_better: bool) -> int:
    best = max(values) if higher_better else min(values)
    return values.index(best)  # ties resolve to the lowest method index


def report_markdown(report: dict) -> str:
    lines: list[str] = []
    tables = report["rank_tables"]
    agg = report["aggregates"]
    dataset_names = [d["name"] for d in report["datasets"]]
    for metric in sorted(tables):
        higher = METRIC_DIRECTIONS[metric]
        for d in sorted(tables[metric], key=int):
            info = tables[metric][d]
            methods = info["methods"]
            lines.append(f"## {metric} (d={d})")
            lines.append("")
            lines.append("| Dataset | " + " | ".join(methods) + " |")
            lines.append("|---" * (len(methods) + 1) + "|")
            for ds in dataset_names:
                cells = []
                means = [agg[ds][m][d]["metrics"][metric]["mean"] for m in methods]
                stds = [agg[ds][m][d]["metrics"][metric]["std"] for m in methods]
                best = _best_column(means, higher)
                for i, (mean, std) in enumerate(zip(means, stds)):
                    text = f"{mean:.3f}±{std:.3f}"
                    cells.append(f"**{text}**" if i == best else text)
                lines.append(f"| {ds} | " + " | ".join(cells) + " |")
            ranks = info["average_rank"]
            best = _best_column(ranks, higher_better=False)
            rank_cells = [
                f"**{r:.2f}**" if i == best else f"{r:.2f}"
                for i, r in enumerate(ranks)
            ]
            lines.append("| Avg.Rank | " + " | ".join(rank_cells) + " |")
            lines.append("")
    return "\n".join(lines)


def emit_report(
    report: dict,
    out_dir: str | Path,
    formats: tuple[str, ...] = FORMATS,
    figures: bool = True,
    stem: str = "report",
) -> list[Path]:
    """Write the requested formats (plus figures) into out_dir."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ReportError(f"cannot create output directory: {exc}") from None
    unknown = set(formats) - set(FORMATS)
    if unknown:
        raise ReportError(f"unknown report formats: {sorted(unknown)}")
    written: list[Path] = []
    if "json" in formats:
        path = out / f"{stem}.json"
        path.write_text(report_json(report))
        written.append(path)
    if "csv" in formats:
        path = out / f"{stem}.csv"
        path.write_text(report_csv(report))
        written.append(path)
    if "markdown" in formats:
        path = out / f"{stem}.md"
        path.write_text(report_markdown(report))
        written.append(path)
    if figures:
        from .figures import render_report_figures

        written.extend(render_report_figures(report, out))
    return written
