"""Render report figures to files alongside the delimited output.

Everything draws through the Agg backend so report generation works
headless. Each function writes one PNG and returns its path.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from . import model as m  # noqa: E402
from .analytics import (  # noqa: E402
    CharacteristicsTable,
    ComparisonReport,
    RegressionPoint,
    RegressionResult,
)

_MODEL_KIND_LABELS = {
    m.ModelKind.POINTER_NOT_NULL.value: "ptr not null",
    m.ModelKind.POINTER_AND_OFFSET.value: "ptr+offset",
    m.ModelKind.ALLOCATION_SIZE.value: "alloc size",
    m.ModelKind.INTEGER_RANGE.value: "int range",
    m.ModelKind.INTEGER_RELATIONSHIP.value: "int r/ship",
    m.ModelKind.CONDITIONAL.value: "conditional",
}


def _save(fig, out_dir: Path, name: str) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def model_kind_bars(table: CharacteristicsTable, out_dir: Path) -> Path:
    kinds = list(_MODEL_KIND_LABELS)
    totals = [sum(r.variable_model_counts.get(k, 0) for r in table.rows)
              for k in kinds]
    fig, ax = plt.subplots(figsize=(7, 3.5))
    ax.bar([_MODEL_KIND_LABELS[k] for k in kinds], totals, color="#4878a8")
    ax.set_ylabel("models")
    ax.set_title("Variable models by kind")
    ax.tick_params(axis="x", rotation=20)
    return _save(fig, out_dir, "model_kinds.png")


def loop_bound_histogram(sessions: Sequence[m.ProofSession], out_dir: Path) -> Path:
    hist: dict[int, int] = {}
    for session in sessions:
        for bound, count in session.metrics.loop_bound_histogram.items():
            hist[bound] = hist.get(bound, 0) + count
    bounds = sorted(hist)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.bar([str(b) for b in bounds], [hist[b] for b in bounds], color="#5a9e6f")
    ax.set_xlabel("unwinding bound")
    ax.set_ylabel("loops")
    ax.set_title("Loop bounds across proofs")
    return _save(fig, out_dir, "loop_bounds.png")


def step_time_chart(session: m.ProofSession, out_dir: Path) -> Path:
    steps = list(m.STEP_KEYS)
    values = [session.metrics.step_seconds.get(k, 0.0) for k in steps]
    labels = ["setup", "termination", "coverage", "models"]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.bar(labels, values, color="#b46a55")
    ax.set_ylabel("seconds")
    ax.set_title(f"Where the time went: {session.id}")
    return _save(fig, out_dir, "step_times.png")


def regression_scatter(points: Sequence[RegressionPoint], result: RegressionResult,
                       out_dir: Path) -> Path:
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.6), sharey=True)
    for ax, attr, fit, label in (
            (axes[0], "formula_size", result.formula, "formula size (clauses)"),
            (axes[1], "program_size", result.program, "program size (loc)")):
        xs = [getattr(p, attr) for p in points]
        ys = [p.seconds for p in points]
        ax.scatter(xs, ys, s=18, color="#4878a8")
        if xs:
            lo, hi = min(xs), max(xs)
            ax.plot([lo, hi],
                    [fit.slope * lo + fit.intercept, fit.slope * hi + fit.intercept],
                    color="#b44", linewidth=1.2)
        ax.set_xlabel(label)
        ax.set_title(f"R² = {fit.r2:.3f}")
    axes[0].set_ylabel("execution seconds")
    return _save(fig, out_dir, "time_regression.png")


def comparison_chart(report: ComparisonReport, out_dir: Path) -> Path:
    metrics = [
        ("files_in_scope", "files in scope"),
        ("modeled_variables", "modeled variables"),
        ("max_loop_bound", "max loop bound"),
        ("execution_seconds", "execution seconds"),
        ("coverage_percent", "coverage %"),
    ]
    fig, axes = plt.subplots(1, len(metrics), figsize=(3.1 * len(metrics), 3.4))
    labels = [c.label for c in report.columns]
    for ax, (attr, title) in zip(axes, metrics):
        medians = [getattr(c, attr).median for c in report.columns]
        ax.bar(labels, medians, color=["#4878a8", "#5a9e6f", "#b46a55"][:len(labels)])
        ax.set_title(title, fontsize=9)
        ax.tick_params(axis="x", rotation=15, labelsize=8)
    return _save(fig, out_dir, "comparison.png")


def coverage_heat_strip(report: m.VerificationReport, out_dir: Path,
                        name: str = "coverage.png") -> Path:
    lines = sorted(report.coverage, key=lambda c: (c.file, c.line))
    colors = {
        m.CoverageStatus.COVERED: "#5a9e6f",
        m.CoverageStatus.UNCOVERED: "#c05050",
        m.CoverageStatus.UNREACHABLE: "#999999",
    }
    fig, ax = plt.subplots(figsize=(8, 1.8))
    for i, line in enumerate(lines):
        ax.bar(i, 1, width=1.0, color=colors[line.status])
    ax.set_yticks([])
    ax.set_xlabel("source lines (report order)")
    ax.set_title("Line coverage")
    return _save(fig, out_dir, name)
