"""Figure rendering for the reporting paths.

All functions write PNG files; nothing opens a window. Colors follow the
repository's legend convention (also used by the browser UI):

* ``ja``  -> red    (converging behavior)
* ``lte`` -> green  (shape-preserving behavior)
* ``dmp`` -> blue   (goal-attractor behavior)
* inconclusive / below-threshold cells -> dark gray
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import ListedColormap
from matplotlib.patches import Patch

from .bias import BiasRecord
from .engine import ReproductionResult, SimilarityMap, robust_region
from .trajectory import Trajectory

REPRESENTATION_COLORS = {
    "ja": "#d1605e",
    "lte": "#5ba053",
    "dmp": "#4c78a8",
}
NEUTRAL_COLOR = "#3b3b3b"
DEMO_COLOR = "#222222"


def _color_for(label: str) -> str:
    return REPRESENTATION_COLORS.get(label, "#b279a2")


def _axis_pair(dims: int) -> tuple[int, int]:
    # 3-D grids render as their first axis pair; the UI offers projections.
    return (0, 1) if dims >= 2 else (0, 0)


def save_region_heatmap(
    smap: SimilarityMap,
    demo: Trajectory,
    path,
    robust_threshold: float | None = None,
) -> Path:
    """Combined similarity regions: one colored cell per winning label."""
    path = Path(path)
    ax_x, ax_y = _axis_pair(smap.grid.dims)
    res = smap.grid.resolution
    labels = list(smap.labels)
    index_grid = smap.best_index.reshape((res,) * smap.grid.dims)
    if smap.grid.dims == 3:
        index_grid = index_grid[:, :, res // 2]
    colors = [_color_for(label) for label in labels]
    cmap = ListedColormap(colors)

    fig, ax = plt.subplots(figsize=(6.5, 5.5))
    axes = smap.grid.axes()
    extent = (axes[ax_x][0], axes[ax_x][-1], axes[ax_y][0], axes[ax_y][-1])
    ax.imshow(
        index_grid.T,
        origin="lower",
        extent=extent,
        cmap=cmap,
        vmin=-0.5,
        vmax=len(labels) - 0.5,
        interpolation="nearest",
        alpha=0.85,
        aspect="auto",
    )
    if robust_threshold is not None:
        mask = ~robust_region(smap, robust_threshold)
        mask_grid = mask.reshape((res,) * smap.grid.dims)
        if smap.grid.dims == 3:
            mask_grid = mask_grid[:, :, res // 2]
        overlay = np.zeros(mask_grid.T.shape + (4,))
        overlay[mask_grid.T] = matplotlib.colors.to_rgba(NEUTRAL_COLOR, alpha=0.75)
        ax.imshow(overlay, origin="lower", extent=extent, interpolation="nearest", aspect="auto")
    ax.plot(demo.samples[:, ax_x], demo.samples[:, ax_y], color=DEMO_COLOR, lw=2.0, label="demonstration")
    ax.scatter(*demo.samples[0, [ax_x, ax_y]], color=DEMO_COLOR, marker="o", zorder=5)
    ax.scatter(*demo.samples[-1, [ax_x, ax_y]], color=DEMO_COLOR, marker="x", zorder=5)
    handles = [Patch(color=_color_for(label), label=label) for label in labels]
    if robust_threshold is not None:
        handles.append(Patch(color=NEUTRAL_COLOR, label=f"below {robust_threshold:.2f}"))
    ax.legend(handles=handles + ax.get_legend_handles_labels()[0], loc="best", fontsize=8)
    ax.set_xlabel(f"axis {ax_x}")
    ax.set_ylabel(f"axis {ax_y}")
    ax.set_title(f"similarity regions ({smap.metric.value}, {smap.constraint_kind} point)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_reproduction_plot(demo: Trajectory, result: ReproductionResult, path) -> Path:
    """Demonstration and the winning reproduction overlaid."""
    path = Path(path)
    ax_x, ax_y = _axis_pair(demo.dims)
    fig, ax = plt.subplots(figsize=(6.0, 5.0))
    ax.plot(demo.samples[:, ax_x], demo.samples[:, ax_y], color=DEMO_COLOR, lw=2.0, label="demonstration")
    rep = result.trajectory.samples
    ax.plot(
        rep[:, ax_x],
        rep[:, ax_y],
        color=_color_for(result.representation),
        lw=2.0,
        label=f"{result.representation} (similarity {result.similarity:.2f})",
    )
    ax.scatter(*rep[0, [ax_x, ax_y]], color=_color_for(result.representation), marker="o", zorder=5)
    ax.legend(fontsize=8)
    ax.set_xlabel(f"axis {ax_x}")
    ax.set_ylabel(f"axis {ax_y}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


_OUTCOME_COLORS = {"ja": REPRESENTATION_COLORS["ja"], "lte": REPRESENTATION_COLORS["lte"], "tie": "#1a1a1a"}


def save_bias_maps(record: BiasRecord, shapes: Mapping[str, Trajectory], path, resolution: int) -> Path:
    """Per-shape winner grids for one metric (red = converging, green = shape, black = tie)."""
    path = Path(path)
    names = [name for name in record.cells if name in shapes]
    cols = min(3, max(1, len(names)))
    rows = (len(names) + cols - 1) // cols
    fig, axes = plt.subplots(rows, cols, figsize=(3.2 * cols, 3.0 * rows), squeeze=False)
    cmap = ListedColormap([_OUTCOME_COLORS["ja"], _OUTCOME_COLORS["lte"], _OUTCOME_COLORS["tie"]])
    code = {"ja": 0, "lte": 1, "tie": 2}
    for ax, name in zip(axes.ravel(), names):
        outcomes = record.cells[name]
        grid = np.array([code[o] for o in outcomes]).reshape(resolution, resolution)
        ax.imshow(grid.T, origin="lower", cmap=cmap, vmin=-0.5, vmax=2.5, interpolation="nearest")
        ax.set_title(name, fontsize=9)
        ax.set_xticks([])
        ax.set_yticks([])
    for ax in axes.ravel()[len(names):]:
        ax.axis("off")
    fig.suptitle(f"{record.metric.value}: {record.decision}", fontsize=11)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
