"""
Grid file formats.

SPDG is a little-endian binary layout: the magic bytes ``SPDG``, a ``u32``
version (1), a ``u8`` axis count, per axis a ``u64`` size and an ``f64``
spacing, then ``f64`` values in row-major order (last axis fastest).

CSV tables have one row per grid point with the lag (or coordinate)
components, the value and a validity flag; floats are written with the
shortest representation that round-trips.
"""

from __future__ import annotations

import csv
import io
import struct
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

__all__ = ["MAGIC", "VERSION", "SPDGError", "SPDGGrid", "encode_spdg", "decode_spdg", "write_spdg", "read_spdg",
           "format_float", "write_csv", "read_csv"]

MAGIC = b"SPDG"
VERSION = 1


class SPDGError(ValueError):
    pass


@dataclass
class SPDGGrid:
    sizes: tuple
    spacings: tuple
    values: np.ndarray


def encode_spdg(values: np.ndarray, spacings: Sequence[float]) -> bytes:
    values = np.asarray(values, dtype="<f8")
    if values.ndim != len(spacings):
        raise SPDGError("one spacing per axis is required")
    if values.ndim > 255:
        raise SPDGError("too many axes")
    head = [MAGIC, struct.pack("<IB", VERSION, values.ndim)]
    for n, s in zip(values.shape, spacings):
        head.append(struct.pack("<Qd", n, float(s)))
    return b"".join(head) + np.ascontiguousarray(values).tobytes(order="C")


def decode_spdg(data: bytes) -> SPDGGrid:
    if len(data) < 9 or data[:4] != MAGIC:
        raise SPDGError("not an SPDG file (bad magic)")
    version, n_axes = struct.unpack_from("<IB", data, 4)
    if version != VERSION:
        raise SPDGError(f"unsupported SPDG version {version}")
    pos = 9
    sizes, spacings = [], []
    for _ in range(n_axes):
        if pos + 16 > len(data):
            raise SPDGError("truncated SPDG header")
        n, s = struct.unpack_from("<Qd", data, pos)
        sizes.append(n)
        spacings.append(s)
        pos += 16
    count = int(np.prod(sizes)) if sizes else 0
    if len(data) - pos != 8 * count:
        raise SPDGError(f"SPDG payload has {len(data) - pos} bytes, expected {8 * count}")
    values = np.frombuffer(data, dtype="<f8", count=count, offset=pos).astype(float).reshape(sizes)
    return SPDGGrid(tuple(sizes), tuple(spacings), values)


def write_spdg(path, values: np.ndarray, spacings: Sequence[float]) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_spdg(values, spacings))


def read_spdg(path) -> SPDGGrid:
    with open(path, "rb") as fh:
        return decode_spdg(fh.read())


def format_float(x: float) -> str:
    """Shortest decimal string that parses back to the same float."""
    return repr(float(x))


def write_csv(stream, axes: Sequence[np.ndarray], values: np.ndarray, valid: Optional[np.ndarray] = None,
              names: Optional[Sequence[str]] = None) -> None:
    values = np.asarray(values, dtype=float)
    valid = np.ones(values.shape, dtype=bool) if valid is None else np.asarray(valid, dtype=bool)
    names = list(names) if names is not None else [f"lag{i}" for i in range(len(axes))]
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(names + ["value", "valid"])
    for idx in np.ndindex(*values.shape):
        row = [format_float(axes[i][k]) for i, k in enumerate(idx)]
        row += [format_float(values[idx]), "1" if valid[idx] else "0"]
        writer.writerow(row)


def read_csv(stream) -> tuple:
    """Inverse of ``write_csv``: returns ``(axes, values, valid, names)``."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    rows = list(csv.reader(stream))
    if not rows:
        raise SPDGError("empty CSV")
    names = rows[0][:-2]
    body = [[float(v) for v in r[:-1]] + [r[-1] == "1"] for r in rows[1:]]
    n_axes = len(names)
    # row-major order lists each axis's samples in order of first appearance
    axes = [np.array(list(dict.fromkeys(r[i] for r in body))) for i in range(n_axes)]
    shape = tuple(a.size for a in axes)
    values = np.array([r[n_axes] for r in body]).reshape(shape)
    valid = np.array([r[n_axes + 1] for r in body], dtype=bool).reshape(shape)
    return axes, values, valid, names
