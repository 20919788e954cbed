"""Figure rendering for reports: error surfaces, path curves, timing bars.

Everything writes PNG files through the Agg backend; nothing opens a window.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def plot_surface(surface, path):
    """Heatmap of validation error over the (m, lambda) grid."""
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    mesh = ax.pcolormesh(
        surface.m_grid,
        surface.lambda_grid,
        surface.errors,
        shading="nearest",
        cmap="viridis",
    )
    if surface.lambda_grid.size > 1 and surface.lambda_grid.min() > 0:
        ax.set_yscale("log")
    ax.set_xlabel("subsampling level m")
    ax.set_ylabel("lambda")
    fig.colorbar(mesh, ax=ax, label="validation error")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_path(steps, errors, path, xlabel="t", ylabel="validation error"):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(steps, errors, marker="o", markersize=3, lw=1.2)
    best = int(np.argmin(errors))
    ax.axvline(steps[best], color="crimson", ls="--", lw=1, label=f"min at {steps[best]}")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_bench(labels, means, stds, path, ylabel="seconds"):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    pos = np.arange(len(labels))
    ax.bar(pos, means, yerr=stds, capsize=4, color="steelblue")
    ax.set_xticks(pos)
    ax.set_xticklabels(labels, rotation=20, ha="right")
    ax.set_ylabel(ylabel)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_cv_curve(values, errors, path, xlabel="hyperparameter", logx=False):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(values, errors, marker="o", markersize=3, lw=1.2)
    if logx:
        ax.set_xscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("validation error")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
