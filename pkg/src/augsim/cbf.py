"""`CBF1` feature files: the bit-exact bridge between ecosystems.

Layout (all integers little-endian):

    magic           4 bytes  b"CBF1"
    dim             uint32
    count           uint32
    fp_len          uint16   followed by fp_len bytes of UTF-8 fingerprint
    id table        count x (uint16 length + UTF-8 bytes)
    data            count x dim float32

The data segment is exactly ``count * dim * 4`` bytes, so file size is
header + id table + that product.
"""

from __future__ import annotations

import struct
from typing import Sequence

import numpy as np

from .errors import DomainError, FormatError

MAGIC = b"CBF1"


def write_features(
    path,
    items: Sequence[tuple[str, np.ndarray]],
    fingerprint: str = "",
) -> None:
    """Write (id, vector) rows; all vectors must share one dimension."""
    dims = {len(np.asarray(vec).ravel()) for _, vec in items}
    if len(dims) > 1:
        raise DomainError(f"inconsistent feature dims: {sorted(dims)}")
    dim = dims.pop() if dims else 0
    fp_bytes = fingerprint.encode("utf-8")
    if len(fp_bytes) > 0xFFFF:
        raise DomainError("fingerprint too long")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", dim, len(items)))
        fh.write(struct.pack("<H", len(fp_bytes)))
        fh.write(fp_bytes)
        for item_id, _ in items:
            id_bytes = item_id.encode("utf-8")
            if len(id_bytes) > 0xFFFF:
                raise DomainError(f"id too long: {item_id[:40]}...")
            fh.write(struct.pack("<H", len(id_bytes)))
            fh.write(id_bytes)
        for _, vec in items:
            fh.write(np.asarray(vec, dtype="<f4").ravel().tobytes())


def read_header(path) -> tuple[int, int, str]:
    """(dim, count, fingerprint) without loading the data segment."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC:
            raise FormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
        dim, count = struct.unpack("<II", fh.read(8))
        (fp_len,) = struct.unpack("<H", fh.read(2))
        return dim, count, fh.read(fp_len).decode("utf-8")


def iter_features(path):
    """Yield (id, vector) rows one at a time; memory stays O(dim)."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC:
            raise FormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
        dim, count = struct.unpack("<II", fh.read(8))
        (fp_len,) = struct.unpack("<H", fh.read(2))
        fh.read(fp_len)
        ids = []
        for _ in range(count):
            raw = fh.read(2)
            if len(raw) != 2:
                raise FormatError(f"{path}: truncated id table")
            (id_len,) = struct.unpack("<H", raw)
            ids.append(fh.read(id_len).decode("utf-8"))
        row_bytes = dim * 4
        for item_id in ids:
            data = fh.read(row_bytes)
            if len(data) != row_bytes:
                raise FormatError(f"{path}: truncated data segment")
            yield item_id, np.frombuffer(data, dtype="<f4").astype(np.float64)


def read_features(path) -> tuple[list[tuple[str, np.ndarray]], str]:
    """Read back (items, fingerprint); exact inverse of write_features."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC:
            raise FormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
        header = fh.read(8)
        if len(header) != 8:
            raise FormatError(f"{path}: truncated header")
        dim, count = struct.unpack("<II", header)
        (fp_len,) = struct.unpack("<H", fh.read(2))
        fingerprint = fh.read(fp_len).decode("utf-8")
        ids = []
        for _ in range(count):
            raw = fh.read(2)
            if len(raw) != 2:
                raise FormatError(f"{path}: truncated id table")
            (id_len,) = struct.unpack("<H", raw)
            ids.append(fh.read(id_len).decode("utf-8"))
        data = fh.read(count * dim * 4)
        if len(data) != count * dim * 4:
            raise FormatError(f"{path}: truncated data segment")
        matrix = np.frombuffer(data, dtype="<f4").reshape(count, dim)
    items = [(item_id, matrix[i].astype(np.float64)) for i, item_id in enumerate(ids)]
    return items, fingerprint
