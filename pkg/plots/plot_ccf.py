#!/usr/bin/env python3
"""Spatial cross-correlation magnitude vs element spacing, per reference antenna.

Input: the simulator's ``ccf.csv``.
"""

import argparse
import sys

import numpy as np
from matplotlib import pyplot as plt

from figspec import FigureSpec, column, read_csv, save

SPEC = FigureSpec(
    kind="ccf",
    xlabel="element spacing (antennas)",
    ylabel="|spatial CCF|",
    figsize=(7.0, 4.5),
)


def build_figure(path):
    _, columns, rows = read_csv(path)
    refs = column(rows, columns, "ref_antenna", int)
    spacing = column(rows, columns, "spacing", int)
    value = column(rows, columns, "abs_value", float)
    fig, ax = plt.subplots(figsize=SPEC.figsize)
    for ref in sorted(set(refs)):
        pts = np.array(
            sorted((s, v) for r, s, v in zip(refs, spacing, value) if r == ref)
        )
        ax.plot(pts[:, 0], pts[:, 1], marker="o", markersize=3, label=f"p={ref}")
    ax.set_xlabel(SPEC.xlabel)
    ax.set_ylabel(SPEC.ylabel)
    ax.set_ylim(bottom=0.0)
    ax.legend()
    fig.tight_layout()
    return fig


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--in", dest="input", required=True, help="ccf.csv")
    parser.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv)
    fig = build_figure(args.input)
    save(fig, args.out, SPEC)
    plt.close(fig)
    return 0


if __name__ == "__main__":
    sys.exit(main())
