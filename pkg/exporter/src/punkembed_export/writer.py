"""Writer for the PUNKEMB1 binary embedding format with a JSON index sidecar.

Layout: 8-byte magic "PUNKEMB1", little-endian u32 dim, then concatenated
little-endian f32 token rows. The sidecar records, per item, the byte offset
of its first row and its token count.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

MAGIC = b"PUNKEMB1"
HEADER_SIZE = len(MAGIC) + 4


class TableWriter:
    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = dim
        self.index: list[dict] = []
        self._chunks: list[bytes] = []
        self._n_rows = 0
        self._seen: set[tuple] = set()

    def add(self, kind: str, item_id: str, sub_index: int | None,
            matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype="<f4")
        key = (kind, item_id, sub_index)
        if key in self._seen:
            raise ValueError(f"duplicate item {key}")
        if matrix.ndim != 2 or matrix.shape[1] != self.dim:
            raise ValueError(
                f"item {key}: encoder produced shape {matrix.shape}, "
                f"expected (*, {self.dim})"
            )
        if matrix.shape[0] < 1:
            raise ValueError(f"item {key}: no token rows")
        self._seen.add(key)
        self.index.append({
            "kind": kind,
            "id": item_id,
            "sub_index": sub_index,
            "offset": HEADER_SIZE + self._n_rows * self.dim * 4,
            "n_tokens": int(matrix.shape[0]),
        })
        self._chunks.append(matrix.tobytes())
        self._n_rows += matrix.shape[0]

    def write(self, prefix: str | Path):
        prefix = Path(prefix)
        prefix.parent.mkdir(parents=True, exist_ok=True)
        with open(f"{prefix}.bin", "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<I", self.dim))
            for chunk in self._chunks:
                fh.write(chunk)
        Path(f"{prefix}.json").write_text(
            json.dumps({"dim": self.dim, "items": self.index}), encoding="utf-8"
        )
