#!/usr/bin/env python3
"""Sliding-window angle power spectrum heatmap (window position x AoD, dB).

Input: the simulator's ``aps.csv``.  The color scale is fixed to the top
40 dB so cluster (dis)appearance and angular drift stay readable.
"""

import argparse
import sys

import numpy as np
from matplotlib import pyplot as plt

from figspec import FigureSpec, column, read_csv, save

SPEC = FigureSpec(
    kind="aps",
    xlabel="AoD (degrees)",
    ylabel="window position (first antenna)",
    figsize=(8.0, 5.0),
    cmap="inferno",
)

FLOOR_DB = -40.0


def build_figure(path):
    _, columns, rows = read_csv(path)
    windows = column(rows, columns, "window_start", int)
    angles = column(rows, columns, "angle_deg", float)
    power = column(rows, columns, "power_db", float)

    w_ids = sorted(set(windows))
    a_ids = sorted(set(angles))
    grid = np.full((len(w_ids), len(a_ids)), FLOOR_DB)
    w_pos = {w: i for i, w in enumerate(w_ids)}
    a_pos = {a: i for i, a in enumerate(a_ids)}
    for w, a, p in zip(windows, angles, power):
        grid[w_pos[w], a_pos[a]] = max(p, FLOOR_DB)

    fig, ax = plt.subplots(figsize=SPEC.figsize)
    mesh = ax.imshow(
        grid,
        aspect="auto",
        origin="lower",
        cmap=SPEC.cmap,
        vmin=FLOOR_DB,
        vmax=0.0,
        extent=(min(a_ids), max(a_ids), min(w_ids) - 0.5, max(w_ids) + 0.5),
        interpolation="nearest",
    )
    ax.set_xlabel(SPEC.xlabel)
    ax.set_ylabel(SPEC.ylabel)
    fig.colorbar(mesh, ax=ax, label="normalized APS (dB)")
    fig.tight_layout()
    return fig, mesh


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--in", dest="input", required=True, help="aps.csv")
    parser.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv)
    fig, _ = build_figure(args.input)
    save(fig, args.out, SPEC)
    plt.close(fig)
    return 0


if __name__ == "__main__":
    sys.exit(main())
