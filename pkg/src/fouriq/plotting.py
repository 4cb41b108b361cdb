"""Deterministic SVG figures (no display, no timestamps)."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path, stamp: str) -> None:
    with matplotlib.rc_context({"svg.hashsalt": stamp}):
        fig.savefig(path, format="svg", metadata={"Date": None, "Description": stamp})
    plt.close(fig)


def stem_plot(table, path, stamp: str) -> None:
    """``|b_l|`` against the flat lattice index (labelled by ``l`` when d = 1)."""
    fig, ax = plt.subplots(figsize=(6, 3.5))
    mags = np.abs(table.coeffs)
    if table.lattice.d == 1:
        xs = table.lattice.points()[:, 0]
        ax.set_xlabel("l")
    else:
        xs = np.arange(len(mags))
        ax.set_xlabel("lattice index")
    ax.stem(xs, mags)
    ax.set_ylabel("|b_l|")
    _save(fig, path, stamp)


def loglog_plot(rs, errors, bounds, path, stamp: str) -> None:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.loglog(rs, np.maximum(errors, 1e-16), "o-", label="|exact - trotter|")
    ax.loglog(rs, bounds, "--", label="tau^2 A / (2r)")
    ax.set_xlabel("r")
    ax.set_ylabel("error")
    ax.legend()
    _save(fig, path, stamp)


def curve_plot(sizes, mses, path, stamp: str) -> None:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.loglog(sizes, np.maximum(mses, 1e-16), "o-")
    ax.set_xlabel("training samples T")
    ax.set_ylabel("held-out MSE")
    _save(fig, path, stamp)


def heatmap(matrix, path, stamp: str) -> None:
    fig, ax = plt.subplots(figsize=(4.5, 4))
    im = ax.imshow(matrix, cmap="viridis")
    fig.colorbar(im, ax=ax)
    ax.set_title("Gram matrix")
    _save(fig, path, stamp)
