"""Figures for experiment reports and nibble trajectories (Agg backend, files only)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def plot_success_curve(report, path) -> Path:
    """Success rate per solver against n, with the first-moment expectation on a log axis."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6, 4))
    ns = report.params["ns"]
    for solver in report.params["solvers"]:
        rates = [row["success_rate"] for row in report.rows if row["solver"] == solver]
        ax.plot(ns, rates, marker="o", label=f"{solver} success")
    ax.set_xlabel("n (parts)")
    ax.set_ylabel("success rate")
    ax.set_ylim(-0.05, 1.05)
    ax2 = ax.twinx()
    logE = [row["first_moment_log"] for row in report.rows if row["solver"] == report.params["solvers"][0]]
    ax2.plot(ns, np.array(logE) / np.log(10), color="grey", linestyle="--", label="log10 E[#IT]")
    ax2.set_ylabel("log10 expected IT count")
    lines = ax.get_legend_handles_labels()[0] + ax2.get_legend_handles_labels()[0]
    labels = ax.get_legend_handles_labels()[1] + ax2.get_legend_handles_labels()[1]
    ax.legend(lines, labels, loc="best", fontsize="small")
    ax.set_title(f"k={report.params['k']}, r={report.params['r']}, s={report.params['s']}")
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path


def plot_trajectory(trajectory: list[dict], path) -> Path:
    path = Path(path)
    steps = [row["step"] for row in trajectory]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(steps, [row["min_part_size"] for row in trajectory], label="min |V_i(t)|")
    ax.plot(steps, [row["S"] for row in trajectory], linestyle="--", label="S(t)")
    ax.plot(steps, [row["max_avg_degree"] for row in trajectory], label="max avg degree")
    ax.plot(steps, [row["D"] for row in trajectory], linestyle="--", label="D(t)")
    ax.set_xlabel("step")
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path
