"""Matplotlib renderings written next to the delimited report outputs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def render_funnel(funnel: dict, path: str | Path) -> None:
    """Horizontal bars of surviving tweet counts per selection stage."""
    stages = [
        ("total_records", "total records"),
        ("english", "english"),
        ("original_content", "original content"),
        ("with_hashtag", "with hashtag"),
        ("frequency_filtered", "frequency filtered"),
        ("train", "train"),
        ("validation", "validation"),
        ("test", "test"),
    ]
    labels = [label for key, label in stages if key in funnel]
    values = [funnel[key] for key, _ in stages if key in funnel]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.barh(range(len(values))[::-1], values, color="#4878a8")
    ax.set_yticks(range(len(values))[::-1])
    ax.set_yticklabels(labels)
    ax.set_xlabel("tweets")
    ax.set_title("corpus selection funnel")
    for i, v in enumerate(values):
        ax.text(v, len(values) - 1 - i, f" {v}", va="center", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_scores(reports: list[dict], path: str | Path, title: str = "evaluation") -> None:
    """Bar chart of metric scores; lift annotated when present."""
    labels = []
    values = []
    notes = []
    for rep in reports:
        labels.append(rep["metric"])
        values.append(rep["score"])
        lift = rep.get("lift_vs_baseline")
        notes.append(f"lift {lift:.2f}x" if lift else "")
    fig, ax = plt.subplots(figsize=(5, 4))
    bars = ax.bar(labels, values, color=["#4878a8", "#a84848", "#6aa848", "#a88a48"][: len(values)])
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("score")
    ax.set_title(title)
    for bar, value, note in zip(bars, values, notes):
        text = f"{value:.4f}"
        if note:
            text += f"\n{note}"
        ax.text(bar.get_x() + bar.get_width() / 2, value, text, ha="center", va="bottom", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_sweep(rows: list[dict], path: str | Path) -> None:
    """Score vs vector size, one line per metric."""
    metrics = sorted({row["metric"] for row in rows})
    fig, ax = plt.subplots(figsize=(6, 4))
    for metric in metrics:
        pts = sorted((row["dim"], row["score"]) for row in rows if row["metric"] == metric)
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=metric)
    ax.set_xlabel("vector size")
    ax.set_ylabel("validation score")
    ax.set_title("vector-size sweep")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
