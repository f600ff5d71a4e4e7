#!/usr/bin/env python3
"""Cluster evolution along the array: antenna x cluster heat strip.

Color is the per-antenna cluster power in dB; antennas where a cluster is
invisible are blank.  Input: the simulator's ``evolve.csv``.
"""

import argparse
import sys

import numpy as np
from matplotlib import pyplot as plt

from figspec import FigureSpec, column, read_csv, save

SPEC = FigureSpec(
    kind="evolution",
    xlabel="BS antenna index",
    ylabel="cluster",
    figsize=(8.0, 4.5),
)


def build_figure(path):
    _, columns, rows = read_csv(path)
    clusters = column(rows, columns, "cluster", int)
    antennas = column(rows, columns, "antenna", int)
    visible = column(rows, columns, "visible", int)
    power_db = column(rows, columns, "power_db", float)

    c_ids = sorted(set(clusters))
    a_ids = sorted(set(antennas))
    grid = np.full((len(c_ids), len(a_ids)), np.nan)
    c_pos = {c: i for i, c in enumerate(c_ids)}
    a_pos = {a: i for i, a in enumerate(a_ids)}
    for c, a, vis, p in zip(clusters, antennas, visible, power_db):
        if vis and np.isfinite(p):
            grid[c_pos[c], a_pos[a]] = p

    masked = np.ma.masked_invalid(grid)
    fig, ax = plt.subplots(figsize=SPEC.figsize)
    cmap = plt.get_cmap(SPEC.cmap).copy()
    cmap.set_bad("white")
    finite = grid[np.isfinite(grid)]
    vmin, vmax = (finite.min(), finite.max()) if finite.size else (0.0, 1.0)
    mesh = ax.imshow(
        masked,
        aspect="auto",
        origin="lower",
        cmap=cmap,
        vmin=vmin,
        vmax=vmax,
        extent=(min(a_ids) - 0.5, max(a_ids) + 0.5, min(c_ids) - 0.5, max(c_ids) + 0.5),
        interpolation="nearest",
    )
    ax.set_xlabel(SPEC.xlabel)
    ax.set_ylabel(SPEC.ylabel)
    fig.colorbar(mesh, ax=ax, label="cluster power (dB)")
    fig.tight_layout()
    return fig, mesh


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--in", dest="input", required=True, help="evolve.csv")
    parser.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv)
    fig, _ = build_figure(args.input)
    save(fig, args.out, SPEC)
    plt.close(fig)
    return 0


if __name__ == "__main__":
    sys.exit(main())
