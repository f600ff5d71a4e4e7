"""Shared plumbing for the figure scripts.

Every script reads one of the simulator's commented CSV files (``#key=value``
lines, then a header row), checks the schema version, and renders a fixed
figure geometry so identical inputs give byte-identical images.  PNG
metadata is pinned to a constant Software tag; matplotlib writes no
timestamps into PNG output.
"""

import csv
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

SCHEMA_VERSION = "1"
PNG_METADATA = {"Software": "mmgbsm-plots"}


class SchemaError(ValueError):
    """The CSV announces a schema this script does not understand."""


def read_csv(path):
    """Read a commented CSV: returns (meta, columns, rows-of-strings)."""
    meta = {}
    with open(path, newline="", encoding="utf-8") as fh:
        pos = fh.tell()
        line = fh.readline()
        while line.startswith("#"):
            key, _, value = line[1:].rstrip("\n").partition("=")
            meta[key] = value
            pos = fh.tell()
            line = fh.readline()
        fh.seek(pos)
        reader = csv.reader(fh)
        columns = next(reader)
        rows = list(reader)
    if meta.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError(
            f"{path}: schema_version {meta.get('schema_version')!r}, "
            f"this script reads {SCHEMA_VERSION!r}"
        )
    return meta, columns, rows


def column(rows, columns, name, convert=float):
    idx = columns.index(name)
    return [convert(row[idx]) for row in rows]


@dataclass(frozen=True)
class FigureSpec:
    """Fixed figure geometry per figure kind."""

    kind: str
    xlabel: str
    ylabel: str
    figsize: tuple = (8.0, 4.5)
    dpi: int = 120
    cmap: str = "viridis"
    metadata: dict = field(default_factory=lambda: dict(PNG_METADATA))


def save(fig, out_path, spec: FigureSpec):
    fig.savefig(out_path, dpi=spec.dpi, metadata=spec.metadata)
