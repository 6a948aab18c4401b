"""Field file formats.

SPDE2D01 binary layout (all little-endian)::

    8 bytes   magic b"SPDE2D01"
    3 x u64   n_times, n_y, n_z
    f64[n_times]            times
    f64[n_y]                ys
    f64[n_z]                zs
    f64[n_times*n_y*n_z]    values, row-major (time, y, z)
"""

from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

from .errors import FormatError
from .simulate import FieldSample

MAGIC = b"SPDE2D01"
_HEADER = struct.Struct("<8sQQQ")


def write_field(fld: FieldSample, path) -> None:
    nt, ny, nz = fld.values.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, nt, ny, nz))
        for arr in (fld.times, fld.ys, fld.zs, fld.values):
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def read_field(path) -> FieldSample:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise FormatError(f"{path}: too short for an SPDE2D01 header")
    magic, nt, ny, nz = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    n = nt + ny + nz + nt * ny * nz
    expected = _HEADER.size + 8 * n
    if len(data) != expected:
        raise FormatError(f"{path}: expected {expected} bytes, found {len(data)}")
    flat = np.frombuffer(data, dtype="<f8", offset=_HEADER.size).astype(float)
    times = flat[:nt]
    ys = flat[nt : nt + ny]
    zs = flat[nt + ny : nt + ny + nz]
    values = flat[nt + ny + nz :].reshape(nt, ny, nz)
    return FieldSample(times, ys, zs, values)


def write_field_csv(fld: FieldSample, path) -> None:
    """Long-format CSV with columns t, y, z, value (same row-major order)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "y", "z", "value"])
        for i, t in enumerate(fld.times):
            for j, y in enumerate(fld.ys):
                for k, z in enumerate(fld.zs):
                    w.writerow([repr(float(t)), repr(float(y)), repr(float(z)), repr(float(fld.values[i, j, k]))])


def read_field_csv(path) -> FieldSample:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise FormatError(f"{path}: no data rows")
    t = np.array([float(r["t"]) for r in rows])
    y = np.array([float(r["y"]) for r in rows])
    z = np.array([float(r["z"]) for r in rows])
    v = np.array([float(r["value"]) for r in rows])
    times, ys, zs = np.unique(t), np.unique(y), np.unique(z)
    if times.size * ys.size * zs.size != v.size:
        raise FormatError(f"{path}: rows do not form a complete (t, y, z) grid")
    values = np.empty((times.size, ys.size, zs.size))
    values[np.searchsorted(times, t), np.searchsorted(ys, y), np.searchsorted(zs, z)] = v
    return FieldSample(times, ys, zs, values)
