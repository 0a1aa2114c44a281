"""Report figures rendered to image files next to the delimited reports.

Uses the object-oriented matplotlib API (no pyplot, no global state), so
rendering works headless and never touches a GUI backend.
"""

from __future__ import annotations

import os
from typing import Sequence

from matplotlib.figure import Figure

from .evaluation import ComparisonReport, MetricsReport


def save_loss_curve(loss_history: Sequence[float], path: str) -> str:
    """Training loss per epoch; epoch 0 is the untrained starting point."""
    fig = Figure(figsize=(7, 4.2))
    ax = fig.subplots()
    ax.plot(range(len(loss_history)), loss_history, color="#2a6f97", linewidth=1.6)
    ax.set_xlabel("epoch")
    ax.set_ylabel("weighted mean relative error")
    ax.set_title("training loss")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    return path


def save_pred_comparison(report: ComparisonReport, path: str) -> str:
    """Grouped bars: baseline versus calibrated PRED percent per threshold."""
    thresholds = [row.threshold for row in report.rows]
    baseline = [row.baseline_pct for row in report.rows]
    calibrated = [row.nfa_pct for row in report.rows]
    positions = range(len(thresholds))
    width = 0.38
    fig = Figure(figsize=(7, 4.2))
    ax = fig.subplots()
    ax.bar(
        [p - width / 2 for p in positions],
        baseline,
        width,
        label="baseline",
        color="#adb5bd",
    )
    ax.bar(
        [p + width / 2 for p in positions],
        calibrated,
        width,
        label="calibrated",
        color="#2a6f97",
    )
    ax.set_xticks(list(positions), [f"{t}%" for t in thresholds])
    ax.set_xlabel("relative error threshold")
    ax.set_ylabel("projects within threshold (%)")
    ax.set_ylim(0, 105)
    ax.set_title(f"estimation accuracy over {report.n} projects")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    return path


def save_mre_profile(
    nfa: MetricsReport, baseline: MetricsReport, path: str
) -> str:
    """Sorted per-project relative errors for both estimators."""
    fig = Figure(figsize=(7, 4.2))
    ax = fig.subplots()
    ax.plot(
        sorted(baseline.per_project_mre),
        label=f"baseline (mmre {baseline.mmre:.3f})",
        color="#adb5bd",
        linewidth=1.6,
    )
    ax.plot(
        sorted(nfa.per_project_mre),
        label=f"calibrated (mmre {nfa.mmre:.3f})",
        color="#2a6f97",
        linewidth=1.6,
    )
    ax.set_xlabel("project (sorted by error)")
    ax.set_ylabel("relative error")
    ax.set_title("per-project error profile")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    return path


def render_training_figures(
    loss_history: Sequence[float], directory: str
) -> list[str]:
    os.makedirs(directory, exist_ok=True)
    return [save_loss_curve(loss_history, os.path.join(directory, "loss_curve.png"))]


def render_evaluation_figures(
    comparison: ComparisonReport,
    nfa: MetricsReport,
    baseline: MetricsReport,
    directory: str,
) -> list[str]:
    os.makedirs(directory, exist_ok=True)
    return [
        save_pred_comparison(comparison, os.path.join(directory, "pred_comparison.png")),
        save_mre_profile(nfa, baseline, os.path.join(directory, "mre_profile.png")),
    ]
