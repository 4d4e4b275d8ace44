"""Report figures rendered alongside the delimited outputs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from tacbench.tacgen import ORGANS


def render_report_figures(records, median_rows, timing_rows, out_dir) -> list[str]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    figures = []
    figures.append(_accuracy_figure(records, out_dir / "fig_accuracy.png"))
    figures.append(_timing_figure(timing_rows, out_dir / "fig_timing.png"))
    figures.append(_recall_heatmap(median_rows, out_dir / "fig_recall.png"))
    return figures


def _accuracy_figure(records, path: Path) -> str:
    by_method = {}
    for rec in records:
        if rec.status == "ok":
            by_method.setdefault(rec.method, []).append(rec.accuracy)
    methods = list(by_method)
    fig, ax = plt.subplots(figsize=(max(6, 0.7 * len(methods)), 4))
    ax.boxplot([by_method[m] for m in methods], tick_labels=methods)
    ax.set_ylabel("accuracy")
    ax.set_ylim(0.0, 1.05)
    ax.set_title("Accuracy per method across patients")
    ax.tick_params(axis="x", rotation=60)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)


def _timing_figure(timing_rows, path: Path) -> str:
    methods = [row["method"] for row in timing_rows]
    totals = [(row["mean_reduce_seconds"] or 0.0) + row["mean_fit_seconds"]
              for row in timing_rows]
    fig, ax = plt.subplots(figsize=(max(6, 0.7 * len(methods)), 4))
    ax.bar(methods, totals)
    ax.set_ylabel("mean seconds per patient")
    ax.set_yscale("log")
    ax.set_title("Mean processing time per method")
    ax.tick_params(axis="x", rotation=60)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)


def _recall_heatmap(median_rows, path: Path) -> str:
    methods = [row["method"] for row in median_rows]
    data = np.array([[row[f"recall_{o}"] for o in ORGANS] for row in median_rows])
    fig, ax = plt.subplots(figsize=(6, max(4, 0.4 * len(methods))))
    im = ax.imshow(data, vmin=0.0, vmax=1.0, aspect="auto", cmap="viridis")
    ax.set_xticks(range(len(ORGANS)), ORGANS)
    ax.set_yticks(range(len(methods)), methods)
    ax.set_title("Median recall per organ")
    fig.colorbar(im, ax=ax, label="recall")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return str(path)
