"""Token embedding provider: trainable lookup table at desk scale, or
contextual vectors loaded from the binary CEMB interchange file."""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .tensor import Tensor, gather_rows


class FormatError(ValueError):
    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


@dataclass
class EmbeddingMatrix:
    values: Tensor  # [n, d]
    source: str  # trainable_table | contextual_file

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]


def embed(ids, table: Tensor) -> EmbeddingMatrix:
    """Row i of the result is table[ids[i]]; differentiable w.r.t. table."""
    try:
        rows = gather_rows(table, ids)
    except IndexError as exc:
        raise IndexError(f"vocab error: {exc}") from exc
    return EmbeddingMatrix(values=rows, source="trainable_table")


MAGIC = b"CEMB"
VERSION = 1


def save_contextual(path, records) -> None:
    """Write (embedding [n, d] float32, label) records in the CEMB format.

    Layout (little-endian): magic "CEMB", version u32, record count u32;
    per record: n u32, d u32, n*d float32 row-major, label i32.
    """
    records = list(records)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, len(records)))
        for emb, label in records:
            arr = np.ascontiguousarray(emb, dtype="<f4")
            if arr.ndim != 2:
                raise FormatError(f"record must be rank 2, got shape {arr.shape}")
            n, d = arr.shape
            fh.write(struct.pack("<II", n, d))
            fh.write(arr.tobytes())
            fh.write(struct.pack("<i", int(label)))


def load_contextual(path) -> list[tuple[EmbeddingMatrix, int]]:
    """Read a CEMB file; enforces a uniform width d across records."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != MAGIC:
        raise FormatError(f"bad magic {blob[:4]!r}", offset=0)
    if len(blob) < 12:
        raise FormatError("truncated header", offset=len(blob))
    version, count = struct.unpack_from("<II", blob, 4)
    if version != VERSION:
        raise FormatError(f"unsupported version {version}", offset=4)
    out: list[tuple[EmbeddingMatrix, int]] = []
    off = 12
    width: int | None = None
    for rec in range(count):
        if off + 8 > len(blob):
            raise FormatError(f"truncated record header for record {rec}", offset=off)
        n, d = struct.unpack_from("<II", blob, off)
        off += 8
        nbytes = 4 * n * d
        if off + nbytes + 4 > len(blob):
            raise FormatError(f"truncated payload for record {rec}", offset=off)
        if width is None:
            width = d
        elif d != width:
            raise FormatError(f"mixed widths: {width} then {d} at record {rec}", offset=off)
        data = np.frombuffer(blob, dtype="<f4", count=n * d, offset=off).reshape(n, d)
        off += nbytes
        (label,) = struct.unpack_from("<i", blob, off)
        off += 4
        out.append((EmbeddingMatrix(values=Tensor(data.copy()), source="contextual_file"),
                    label))
    return out
