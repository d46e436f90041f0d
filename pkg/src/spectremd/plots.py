"""Matplotlib figure rendering for report outputs.

Every report CSV has a figure rendered next to it so results can be
inspected without a separate plotting step. Figures are written with fixed
metadata so reruns produce byte-identical files.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_SAVE_KW = {"dpi": 130, "metadata": {"Software": None}}


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def save_density_figure(curves, path, title="Eigenvalue density"):
    """Overlay density curves; ``curves`` is a list of (label, DensityCurve)."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    many = len(curves) > 8
    for label, curve in curves:
        if many:
            ax.plot(curve.grid, curve.density, lw=0.8, alpha=0.5, color="tab:blue")
        else:
            ax.plot(curve.grid, curve.density, lw=1.4, label=label)
    ax.set_xlabel("eigenvalue")
    ax.set_ylabel("density")
    ax.set_title(title)
    if not many:
        ax.legend(frameon=False)
    _finish(fig, path)


def save_roc_figure(curve, path):
    """Mean ROC curve with its area annotated."""
    fig, ax = plt.subplots(figsize=(4.8, 4.4))
    ax.plot(curve.fpr, curve.tpr, color="tab:blue", lw=1.6,
            label=f"mean ROC (AUC = {curve.auc:.3f})")
    ax.plot([0, 1], [0, 1], color="gray", lw=0.8, ls="--")
    ax.set_xlabel("false positive rate")
    ax.set_ylabel("true positive rate")
    ax.set_xlim(-0.02, 1.02)
    ax.set_ylim(-0.02, 1.02)
    ax.legend(frameon=False, loc="lower right")
    _finish(fig, path)


def save_gram_figure(values, class_boundary, path, title="Kernel Gram matrix"):
    """Heat map of a Gram matrix ordered class-0-then-class-1.

    ``class_boundary`` is the number of class-0 rows; a square marks each
    class's submatrix.
    """
    values = np.asarray(values)
    n = values.shape[0]
    fig, ax = plt.subplots(figsize=(5.2, 4.6))
    im = ax.imshow(values, origin="lower", cmap="viridis", interpolation="nearest")
    for lo, hi in ((0, class_boundary), (class_boundary, n)):
        ax.add_patch(plt.Rectangle((lo - 0.5, lo - 0.5), hi - lo, hi - lo,
                                   fill=False, edgecolor="white", lw=1.2))
    fig.colorbar(im, ax=ax, shrink=0.85)
    ax.set_title(title)
    ax.set_xlabel("subject (class 0 first)")
    ax.set_ylabel("subject (class 0 first)")
    _finish(fig, path)


def save_precision_recall_figure(precisions, recalls, path):
    """Scatter of per-repetition precision against recall."""
    precisions = np.asarray(precisions, dtype=float)
    recalls = np.asarray(recalls, dtype=float)
    fig, ax = plt.subplots(figsize=(4.8, 4.4))
    ax.scatter(recalls, precisions, s=18, alpha=0.6, color="tab:blue")
    ok = ~np.isnan(precisions)
    if ok.any():
        ax.scatter([recalls[ok].mean()], [precisions[ok].mean()], s=70, marker="x",
                   color="tab:red", label="mean")
        ax.legend(frameon=False)
    ax.set_xlabel("recall")
    ax.set_ylabel("precision")
    ax.set_xlim(-0.02, 1.02)
    ax.set_ylim(-0.02, 1.02)
    ax.set_title("Precision and recall per repetition")
    _finish(fig, path)


def save_auc_boxplot(groups, path, title="ROC AUC per repetition"):
    """Boxplots of AUC distributions; ``groups`` is a list of (label, values)."""
    labels = [label for label, _ in groups]
    data = [np.asarray(values, dtype=float) for _, values in groups]
    fig, ax = plt.subplots(figsize=(1.6 + 1.3 * len(groups), 4.2))
    ax.boxplot(data, tick_labels=labels)
    ax.set_ylabel("ROC AUC")
    ax.set_title(title)
    ax.grid(axis="y", lw=0.3, alpha=0.5)
    _finish(fig, path)
