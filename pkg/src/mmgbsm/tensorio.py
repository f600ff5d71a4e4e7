"""Binary tensor container and self-describing CSV output.

Tensor layout: an 8-byte magic, an 8-byte little-endian header length,
a UTF-8 JSON header (sorted keys, so identical content gives identical
bytes), then the raw little-endian complex payload in C order.  The JSON
header records shape, dtype, tap delays, seeds and provenance, making the
file parseable from any language.

CSV files open with ``#key=value`` comment lines (schema version, seed,
config hash, estimator metadata) followed by a column-name row.
"""

from __future__ import annotations

import csv
import io
import json
import struct
from pathlib import Path

import numpy as np

MAGIC = b"MMGBSMT1"
CSV_SCHEMA_VERSION = 1
TENSOR_SCHEMA_VERSION = 1

_DTYPES = {"complex64": "<c8", "complex128": "<c16"}


def write_tensor(path, gains: np.ndarray, header: dict, dtype: str = "complex64") -> None:
    """Write a complex tensor with its JSON header; atomic via rename."""
    if dtype not in _DTYPES:
        raise ValueError(f"dtype must be one of {sorted(_DTYPES)}, got {dtype!r}")
    path = Path(path)
    full_header = dict(header)
    full_header["schema_version"] = TENSOR_SCHEMA_VERSION
    full_header["dtype"] = dtype
    full_header["shape"] = list(gains.shape)
    blob = json.dumps(full_header, sort_keys=True).encode("utf-8")
    payload = np.ascontiguousarray(gains).astype(_DTYPES[dtype]).tobytes()
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<Q", len(blob)))
        fh.write(blob)
        fh.write(payload)
    tmp.replace(path)


def read_tensor_header(path) -> dict:
    """Parse only the JSON header of a tensor file."""
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != MAGIC:
            raise ValueError(f"bad magic {magic!r}, expected {MAGIC!r}")
        (length,) = struct.unpack("<Q", fh.read(8))
        return json.loads(fh.read(length).decode("utf-8"))


def read_tensor(path) -> tuple[np.ndarray, dict]:
    """Load a tensor file; returns (gains, header)."""
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != MAGIC:
            raise ValueError(f"bad magic {magic!r}, expected {MAGIC!r}")
        (length,) = struct.unpack("<Q", fh.read(8))
        header = json.loads(fh.read(length).decode("utf-8"))
        payload = fh.read()
    gains = np.frombuffer(payload, dtype=_DTYPES[header["dtype"]])
    return gains.reshape(header["shape"]), header


def write_csv(path, comments: dict, columns: list[str], rows) -> None:
    """Write a CSV with ``#key=value`` comment lines and a header row."""
    buf = io.StringIO()
    buf.write(f"#schema_version={CSV_SCHEMA_VERSION}\n")
    for key, value in comments.items():
        buf.write(f"#{key}={value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(row)
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(buf.getvalue(), encoding="utf-8")
    tmp.replace(path)


def read_csv(path) -> tuple[dict, list[str], list[list[str]]]:
    """Read a commented CSV back as (comments, columns, string rows)."""
    comments: dict[str, str] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        pos = fh.tell()
        line = fh.readline()
        while line.startswith("#"):
            key, _, value = line[1:].rstrip("\n").partition("=")
            comments[key] = value
            pos = fh.tell()
            line = fh.readline()
        fh.seek(pos)
        reader = csv.reader(fh)
        columns = next(reader)
        rows = [row for row in reader]
    return comments, columns, rows
