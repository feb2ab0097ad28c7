"""Figure rendering for traces, convergence curves and suite reports.

Everything renders through the Agg backend straight to files; SVG output
falls out of the file extension (the CLI defaults to .svg).
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .variation import SampledPath

_FIGSIZE = (6.0, 4.0)


def save_trace_plot(traces: dict, out, title: str = "") -> None:
    """Plot named sampled paths: x-y plane in 2d, coordinates vs time otherwise."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for name, path in traces.items():
        if path.dim == 2:
            ax.plot(path.values[:, 0], path.values[:, 1], label=name, lw=1.0)
        else:
            for j in range(path.dim):
                label = name if path.dim == 1 else f"{name}[{j + 1}]"
                ax.plot(path.times, path.values[:, j], label=label, lw=1.0)
    dims = {p.dim for p in traces.values()}
    if dims == {2}:
        ax.set_xlabel("x1")
        ax.set_ylabel("x2")
        ax.set_aspect("equal", adjustable="datalim")
    else:
        ax.set_xlabel("t")
        ax.set_ylabel("x")
    if title:
        ax.set_title(title)
    if traces:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out)
    plt.close(fig)


def save_convergence_plot(series: dict, out, title: str = "", xlabel: str = "step") -> None:
    """Semilog plot of one or more positive sequences (deltas, distances)."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for name, values in series.items():
        values = np.asarray(values, dtype=float)
        floor = np.maximum(values, 1e-300)
        ax.semilogy(np.arange(len(values)), floor, marker="o", ms=3, lw=1.0, label=name)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("value")
    if title:
        ax.set_title(title)
    if series:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out)
    plt.close(fig)


def save_suite_overview(results, out) -> None:
    """One bar per acceptance criterion: measured value against tolerance."""
    fig, ax = plt.subplots(figsize=(7.5, 4.0))
    idx = np.arange(len(results))
    measured = [max(r.measured, 1e-300) if r.measured is not None else np.nan for r in results]
    tols = [r.tolerance if r.tolerance else np.nan for r in results]
    colors = ["#2a9d4e" if r.passed else "#c23b22" for r in results]
    ax.bar(idx, measured, color=colors, label="measured")
    ax.plot(idx, tols, "k_", ms=14, label="tolerance")
    ax.set_yscale("log")
    ax.set_xticks(idx)
    ax.set_xticklabels([str(r.index) for r in results])
    ax.set_xlabel("criterion")
    ax.set_ylabel("measured vs tolerance")
    ax.set_title("acceptance suite")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out)
    plt.close(fig)
