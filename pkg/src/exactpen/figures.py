"""Optional rendering of report data to PNG files.

matplotlib is imported lazily so that the computational paths never pay
for it; every function here takes already-computed report objects and an
output location and returns the list of files it wrote.
"""

from __future__ import annotations

import math
from pathlib import Path

from .exactness import ExactnessReport
from .instances import ProbeRow
from .model import BlockPoint


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _block_grid(x, side: int | None):
    if side is not None:
        return x.reshape(side, side, order="F")
    root = math.isqrt(x.size)
    if root * root == x.size:
        return x.reshape(root, root, order="F")
    return x.reshape(1, -1)


def save_block_heatmaps(
    point: BlockPoint, stem: Path, side: int | None = None
) -> list[Path]:
    """One heatmap PNG per block; square blocks render as matrices."""
    plt = _pyplot()
    written = []
    for i in range(point.n_blocks):
        grid = _block_grid(point.block(i), side)
        fig, ax = plt.subplots(figsize=(4.0, 3.4))
        image = ax.imshow(grid, cmap="viridis", interpolation="nearest")
        ax.set_title(f"block {i}")
        fig.colorbar(image, ax=ax)
        path = stem.with_name(f"{stem.name}.block{i}.png")
        fig.savefig(path, dpi=150, bbox_inches="tight")
        plt.close(fig)
        written.append(path)
    return written


def save_probe_figure(rows: list[ProbeRow], path: Path) -> Path:
    """Log-log plot of the distance-to-penalty ratio against epsilon."""
    plt = _pyplot()
    eps = [r.epsilon for r in rows]
    fig, ax = plt.subplots(figsize=(4.8, 3.6))
    ax.loglog(eps, [r.ratio for r in rows], "o", label="measured dist/p")
    ax.loglog(
        eps,
        [r.predicted_dist / r.predicted_p for r in rows],
        "-",
        label="closed form",
    )
    ax.set_xlabel("epsilon")
    ax.set_ylabel("distance / penalty")
    ax.set_title("error-bound probe: ratio diverges as epsilon shrinks")
    ax.legend()
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def save_certify_figure(report: ExactnessReport, path: Path) -> Path:
    """Penalized lattice value across the beta grid with the threshold marked."""
    plt = _pyplot()
    betas = [r.beta for r in report.records]
    values = [r.penalized.value for r in report.records]
    feasible = report.records[0].feasible.value
    fig, ax = plt.subplots(figsize=(4.8, 3.6))
    ax.semilogx(betas, values, "o-", label="penalized lattice value")
    ax.axhline(feasible, color="gray", linestyle="--", label="constrained value")
    if report.beta_bar_estimate is not None:
        ax.axvline(
            report.beta_bar_estimate,
            color="red",
            linestyle=":",
            label="beta-bar estimate",
        )
    ax.set_xlabel("beta")
    ax.set_ylabel("lattice optimum")
    ax.set_title("penalty exactness across the beta grid")
    ax.legend()
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def save_trajectory_figure(trajectory, path: Path) -> Path:
    """Per-sweep penalized objective of one descent run."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(4.8, 3.6))
    sweeps = range(1, len(trajectory) + 1)
    ax.plot(sweeps, list(trajectory), "o-")
    ax.set_xlabel("sweep")
    ax.set_ylabel("penalized objective")
    ax.set_title("descent trajectory")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path
