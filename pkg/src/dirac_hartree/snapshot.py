"""Binary state snapshots.

Layout, all little-endian::

    offset  size  field
    0       4     magic b"DHRT"
    4       4     version (uint32, currently 1)
    8       4     n (uint32)
    12      8     L (float64)
    20      8     m (float64)
    28      8     b (float64)
    36      ...   u then v, each n*n complex128 in row-major order,
                  stored as interleaved (re, im) float64 pairs
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .spectral import SpectralGrid, SpinorField

MAGIC = b"DHRT"
VERSION = 1
_HEADER = struct.Struct("<4sIIddd")
_DTYPE = np.dtype("<c16")


class SnapshotError(ValueError):
    pass


def encode(psi: SpinorField, m: float, b: float) -> bytes:
    grid = psi.grid
    head = _HEADER.pack(MAGIC, VERSION, grid.n, grid.box_length, m, b)
    payload = np.ascontiguousarray(psi.data, dtype=_DTYPE).tobytes(order="C")
    return head + payload


def decode(raw: bytes) -> tuple[SpinorField, float, float]:
    if len(raw) < _HEADER.size:
        raise SnapshotError("snapshot shorter than its header")
    magic, version, n, L, m, b = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise SnapshotError(f"bad magic {magic!r}")
    if version != VERSION:
        raise SnapshotError(f"unsupported snapshot version {version}")
    expected = _HEADER.size + 2 * n * n * _DTYPE.itemsize
    if len(raw) != expected:
        raise SnapshotError(f"snapshot has {len(raw)} bytes, expected {expected}")
    data = np.frombuffer(raw, dtype=_DTYPE, offset=_HEADER.size).reshape(2, n, n)
    grid = SpectralGrid(n, L)
    return SpinorField(grid, data.astype(np.complex128)), m, b


def write_snapshot(path, psi: SpinorField, m: float, b: float) -> None:
    Path(path).write_bytes(encode(psi, m, b))


def read_snapshot(path) -> tuple[SpinorField, float, float]:
    return decode(Path(path).read_bytes())
