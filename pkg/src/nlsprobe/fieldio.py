"""Binary field format and solver checkpoints.

Layout (little-endian): magic "SPECF1", dim u8, n u32, box_length f64,
view tag u8 (0 physical, 1 frequency), time f64, then n^dim complex values
as interleaved f64 pairs in row-major order.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .grid import FREQUENCY, PHYSICAL, Grid, SpectralField

MAGIC = b"SPECF1"
_HEADER = struct.Struct("<6sBIdBd")
_VIEW_TAG = {PHYSICAL: 0, FREQUENCY: 1}
_TAG_VIEW = {v: k for k, v in _VIEW_TAG.items()}


def write_field(path, field: SpectralField) -> None:
    path = Path(path)
    header = _HEADER.pack(
        MAGIC,
        field.grid.dim,
        field.grid.n,
        field.grid.box_length,
        _VIEW_TAG[field.view],
        field.time,
    )
    data = np.ascontiguousarray(field.values, dtype="<c16").tobytes()
    path.write_bytes(header + data)


def read_field(path) -> SpectralField:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated field file")
    magic, dim, n, box_length, tag, time = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    grid = Grid(dim=dim, n=n, box_length=box_length)
    count = n**dim
    expected = _HEADER.size + 16 * count
    if len(raw) != expected:
        raise ValueError(f"{path}: expected {expected} bytes, got {len(raw)}")
    values = np.frombuffer(raw, dtype="<c16", offset=_HEADER.size, count=count)
    values = values.reshape(grid.shape)
    return SpectralField(grid, values, _TAG_VIEW[tag], time)


def write_checkpoint(prefix, field: SpectralField, config: dict, conserved: dict) -> None:
    """Field file plus JSON sidecar; resume is bit-stable for identical config."""
    prefix = Path(prefix)
    write_field(prefix.with_suffix(".specf"), field)
    sidecar = {
        "config": config,
        "time": field.time,
        "conserved": conserved,
    }
    prefix.with_suffix(".json").write_text(json.dumps(sidecar, sort_keys=True, indent=2))


def read_checkpoint(prefix):
    prefix = Path(prefix)
    field = read_field(prefix.with_suffix(".specf"))
    sidecar = json.loads(prefix.with_suffix(".json").read_text())
    return field, sidecar
