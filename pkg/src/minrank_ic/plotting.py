"""Render sweep reports as figure files (headless matplotlib)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .sweep import SweepReport


def render_sweep_figure(report: SweepReport, path: str) -> str:
    """Average achieved rank vs. stall window, one curve per T; saves to ``path``."""
    by_t: dict[float, list[tuple[int, float]]] = {}
    for c in report.cells:
        by_t.setdefault(c.t_param, []).append((c.iterations, float(c.mean_beta)))

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    markers = ["o", "s", "^", "d", "v", "*", "x", "+"]
    for i, (t, pts) in enumerate(sorted(by_t.items())):
        pts = sorted(pts)
        ax.plot(
            [u for u, _ in pts],
            [m for _, m in pts],
            marker=markers[i % len(markers)],
            label=f"T = {t:g}",
        )
    if report.optimum is not None:
        ax.axhline(
            report.optimum, color="gray", linestyle="--", linewidth=1.0,
            label=f"certified optimum = {report.optimum}",
        )
    ax.set_xlabel("stall window U (consecutive probes without improvement)")
    ax.set_ylabel("average achieved rank")
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
