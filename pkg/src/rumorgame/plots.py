"""Static SVG figures for runs and sweeps.

Everything renders through the Agg backend so the CLI works headless.
SVG ids are salted with a fixed string and the creation date is
suppressed, which keeps repeated renders of the same data byte-stable
on one machine.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.colors import ListedColormap
from matplotlib.patches import Patch
import numpy as np

from .dynamics import Trajectory
from .sweep import Regime, SweepGrid, grid_rows

matplotlib.rcParams["svg.hashsalt"] = "rumorgame"

_SVG_META = {"Date": None}

REGIME_COLORS: dict[str, str] = {
    Regime.RISK.value: "#d62728",
    Regime.OPPORTUNITY.value: "#9467bd",
    Regime.IDEAL.value: "#2ca02c",
    Regime.SECURITY.value: "#1f77b4",
    Regime.OPPOSITION.value: "#ff7f0e",
    "error": "#7f7f7f",
}


def save_timeseries(traj: Trajectory, path: Path | str) -> Path:
    """Both population shares against time."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    ax.plot(traj.t, traj.p, color="#d62728", lw=1.2, label="p (spreading netizens)")
    ax.plot(traj.t, traj.q, color="#1f77b4", lw=1.2, label="q (monitoring government)")
    ax.set_xlabel("t")
    ax.set_ylabel("population share")
    ax.set_ylim(-0.02, 1.02)
    ax.grid(True, lw=0.3, alpha=0.5)
    ax.legend(loc="best", frameon=False)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata=_SVG_META)
    plt.close(fig)
    return path


def save_phase(traj: Trajectory, path: Path | str) -> Path:
    """Phase portrait of the run: q against p with start and end marked."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(4.8, 4.8))
    ax.plot(traj.p, traj.q, color="#444444", lw=1.0)
    ax.plot(traj.p[0], traj.q[0], "o", color="#2ca02c", ms=6, label="start")
    ax.plot(traj.p[-1], traj.q[-1], "s", color="#d62728", ms=6, label="end")
    ax.set_xlabel("p")
    ax.set_ylabel("q")
    ax.set_xlim(-0.02, 1.02)
    ax.set_ylim(-0.02, 1.02)
    ax.set_aspect("equal")
    ax.grid(True, lw=0.3, alpha=0.5)
    ax.legend(loc="best", frameon=False)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata=_SVG_META)
    plt.close(fig)
    return path


def save_regime_heatmap(grid: SweepGrid, path: Path | str) -> Path:
    """Grid of regime labels over the two emotion indices."""
    path = Path(path)
    order = list(REGIME_COLORS)
    n1, n2 = len(grid.r1_values), len(grid.r2_values)
    codes = np.zeros((n2, n1), dtype=int)
    seen: set[str] = set()
    for k, row in enumerate(grid_rows(grid)):
        name = row["regime"] if row["error"] is None else "error"
        seen.add(name)
        # row-major over r1 then r2; imshow rows are the r2 axis
        codes[k % n2, k // n2] = order.index(name)

    fig, ax = plt.subplots(figsize=(6.4, 5.2))
    cmap = ListedColormap([REGIME_COLORS[name] for name in order])
    ax.imshow(codes, origin="lower", cmap=cmap, vmin=0, vmax=len(order) - 1,
              aspect="auto", interpolation="nearest")
    ax.set_xticks(range(n1), [f"{v:g}" for v in grid.r1_values],
                  rotation=90, fontsize=7)
    ax.set_yticks(range(n2), [f"{v:g}" for v in grid.r2_values], fontsize=7)
    ax.set_xlabel("netizen emotion index (r1)")
    ax.set_ylabel("government emotion index (r2)")
    handles = [Patch(color=REGIME_COLORS[name], label=name)
               for name in order if name in seen]
    ax.legend(handles=handles, loc="center left", bbox_to_anchor=(1.01, 0.5),
              frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata=_SVG_META)
    plt.close(fig)
    return path
