"""Report rendering: delimited tables plus matplotlib figures.

Every report path writes the machine-readable file first and then a
figure next to it, so runs can be inspected both by scripts and by eye.
Floats are formatted with a fixed precision to keep files reproducible.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .metrics import MetricReport

__all__ = [
    "fmt",
    "write_metrics_tsv",
    "write_ablation_tsv",
    "plot_history",
    "plot_metrics",
    "plot_ablation",
]

HEADLINE = ("f1", "accuracy", "mean_iou", "consistency_rate")


def fmt(x: float) -> str:
    return f"{x:.6f}"


def write_metrics_tsv(path: str | Path, report: MetricReport) -> None:
    items = report.to_dict()
    with open(path, "w") as fh:
        fh.write("metric\tvalue\n")
        for key, value in items.items():
            fh.write(f"{key}\t{fmt(value)}\n")


def write_ablation_tsv(path: str | Path, reports: dict[str, MetricReport]) -> None:
    keys: list[str] = []
    for rep in reports.values():
        for k in rep.to_dict():
            if k not in keys:
                keys.append(k)
    with open(path, "w") as fh:
        fh.write("variant\t" + "\t".join(keys) + "\n")
        for name, rep in reports.items():
            row = rep.to_dict()
            fh.write(name + "\t" + "\t".join(fmt(row.get(k, 0.0)) for k in keys) + "\n")


def plot_history(path: str | Path, history: list[dict]) -> None:
    fig, (ax_loss, ax_val) = plt.subplots(1, 2, figsize=(10, 4))
    epochs = [r["epoch"] for r in history]
    ax_loss.plot(epochs, [r["train_loss"] for r in history], marker="o")
    ax_loss.set_xlabel("epoch")
    ax_loss.set_ylabel("train loss")
    ax_loss.set_title("training loss")

    for key in ("val_" + k for k in HEADLINE):
        pts = [(r["epoch"], r[key]) for r in history if key in r]
        if pts:
            ax_val.plot(*zip(*pts), marker="o", label=key[4:])
    ax_val.set_xlabel("epoch")
    ax_val.set_ylim(-0.02, 1.02)
    ax_val.set_title("validation metrics")
    if ax_val.lines:
        ax_val.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def plot_metrics(path: str | Path, report: MetricReport, title: str = "evaluation") -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    values = [getattr(report, k) for k in HEADLINE]
    ax.bar(range(len(HEADLINE)), values, color="#4878a8")
    ax.set_xticks(range(len(HEADLINE)))
    ax.set_xticklabels(HEADLINE, rotation=20)
    ax.set_ylim(0, 1.05)
    for i, v in enumerate(values):
        ax.text(i, v + 0.01, fmt(v), ha="center", fontsize=8)
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def plot_ablation(path: str | Path, reports: dict[str, MetricReport]) -> None:
    names = list(reports)
    fig, ax = plt.subplots(figsize=(8, 4.5))
    width = 0.8 / len(HEADLINE)
    for j, key in enumerate(HEADLINE):
        xs = [i + j * width for i in range(len(names))]
        ax.bar(xs, [getattr(reports[n], key) for n in names], width=width, label=key)
    ax.set_xticks([i + 1.5 * width for i in range(len(names))])
    ax.set_xticklabels(names)
    ax.set_ylim(0, 1.05)
    ax.legend(fontsize=8)
    ax.set_title("variant comparison")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
