#!/usr/bin/env python3
"""Per-antenna power and Rician K-factor tracks, one curve per shadow spread.

Reads the simulator's ``power.csv`` and optionally ``kfactor.csv``; the
K panel uses a log scale and renders infinite values (no visible cluster)
as gaps.
"""

import argparse
import sys

import numpy as np
from matplotlib import pyplot as plt

from figspec import FigureSpec, column, read_csv, save

SPEC = FigureSpec(
    kind="tracks",
    xlabel="BS antenna index",
    ylabel="power (dB)",
    figsize=(8.0, 6.0),
)


def _per_sigma(rows, columns, value_column):
    sigma = column(rows, columns, "sigma_db", float)
    antenna = column(rows, columns, "antenna", int)
    values = column(rows, columns, value_column, float)
    out = {}
    for s, a, v in zip(sigma, antenna, values):
        out.setdefault(s, []).append((a, v))
    return {s: np.array(sorted(pairs)) for s, pairs in out.items()}


def build_figure(power_path, kfactor_path=None):
    _, p_cols, p_rows = read_csv(power_path)
    axes_count = 2 if kfactor_path else 1
    fig, axes = plt.subplots(axes_count, 1, figsize=SPEC.figsize, squeeze=False)
    ax_power = axes[0, 0]
    for sigma, los in sorted(_per_sigma(p_rows, p_cols, "los_db").items()):
        ax_power.plot(los[:, 0], los[:, 1], label=f"LOS, sigma={sigma:g} dB")
    for sigma, nlos in sorted(_per_sigma(p_rows, p_cols, "nlos_db").items()):
        ax_power.plot(
            nlos[:, 0], nlos[:, 1], linestyle="--", label=f"NLOS, sigma={sigma:g} dB"
        )
    ax_power.set_xlabel(SPEC.xlabel)
    ax_power.set_ylabel(SPEC.ylabel)
    ax_power.legend(fontsize="small", ncol=2)

    if kfactor_path:
        _, k_cols, k_rows = read_csv(kfactor_path)
        ax_k = axes[1, 0]
        for sigma, k in sorted(_per_sigma(k_rows, k_cols, "k_linear").items()):
            values = k[:, 1].copy()
            # gaps where K blows up (no visible cluster) or is zero (no LOS),
            # neither of which a log axis can show
            values[~np.isfinite(values) | (values <= 0)] = np.nan
            ax_k.plot(k[:, 0], values, label=f"sigma={sigma:g} dB")
        ax_k.set_yscale("log")
        ax_k.set_xlabel(SPEC.xlabel)
        ax_k.set_ylabel("Rician K-factor")
        ax_k.legend(fontsize="small")
    fig.tight_layout()
    return fig


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--in", dest="input", required=True, help="power.csv")
    parser.add_argument("--k-in", dest="k_input", help="kfactor.csv (optional)")
    parser.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv)
    fig = build_figure(args.input, args.k_input)
    save(fig, args.out, SPEC)
    plt.close(fig)
    return 0


if __name__ == "__main__":
    sys.exit(main())
