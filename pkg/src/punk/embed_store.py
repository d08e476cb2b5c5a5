"""Binary token-embedding tables with a JSON index sidecar.

Data file layout: 8-byte magic "PUNKEMB1", little-endian u32 dim, then
concatenated little-endian f32 rows. The index JSON records, per item, the
byte offset of its first row and its token count.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Corpus, Concept, tokenize

MAGIC = b"PUNKEMB1"
HEADER_SIZE = len(MAGIC) + 4


@dataclass(frozen=True)
class ItemKey:
    kind: str  # problem | sentence | answer | concept
    id: str
    sub_index: int | None = None

    def as_dict(self) -> dict:
        return {"kind": self.kind, "id": self.id, "sub_index": self.sub_index}


class EmbeddingTable:
    def __init__(self, dim: int):
        self.dim = dim
        self.items: dict[ItemKey, tuple[int, int]] = {}  # key -> (n_tokens, offset)
        self._data = np.empty((0, dim), dtype=np.float32)

    def add(self, key: ItemKey, matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=np.float32)
        if matrix.ndim != 2 or matrix.shape[1] != self.dim:
            raise ValueError(
                f"matrix for {key} has shape {matrix.shape}, expected (*, {self.dim})"
            )
        if matrix.shape[0] < 1:
            raise ValueError(f"empty token matrix for {key}")
        if key in self.items:
            raise ValueError(f"duplicate key {key}")
        offset = HEADER_SIZE + self._data.shape[0] * self.dim * 4
        self.items[key] = (matrix.shape[0], offset)
        self._data = np.vstack([self._data, matrix])

    def tokens(self, key: ItemKey) -> np.ndarray:
        if key not in self.items:
            raise KeyError(f"no embeddings for {key}")
        n, offset = self.items[key]
        start = (offset - HEADER_SIZE) // (self.dim * 4)
        return self._data[start : start + n]

    def pooled(self, key: ItemKey) -> np.ndarray:
        """Arithmetic mean over the item's token rows (float64)."""
        return self.tokens(key).astype(np.float64).mean(axis=0)

    def __contains__(self, key: ItemKey) -> bool:
        return key in self.items


def write_table(table: EmbeddingTable, prefix: str | Path):
    prefix = Path(prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    with open(f"{prefix}.bin", "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", table.dim))
        fh.write(table._data.astype("<f4").tobytes())
    index = {
        "dim": table.dim,
        "items": [
            {**key.as_dict(), "offset": offset, "n_tokens": n}
            for key, (n, offset) in table.items.items()
        ],
    }
    Path(f"{prefix}.json").write_text(json.dumps(index), encoding="utf-8")


def read_table(prefix: str | Path) -> EmbeddingTable:
    prefix = Path(prefix)
    index = json.loads(Path(f"{prefix}.json").read_text(encoding="utf-8"))
    raw = Path(f"{prefix}.bin").read_bytes()
    if raw[: len(MAGIC)] != MAGIC:
        raise ValueError(f"{prefix}.bin: bad magic")
    (dim,) = struct.unpack("<I", raw[len(MAGIC) : HEADER_SIZE])
    if dim != index["dim"]:
        raise ValueError(f"dim mismatch: data file {dim}, index {index['dim']}")
    table = EmbeddingTable(dim)
    payload = np.frombuffer(raw, dtype="<f4", offset=HEADER_SIZE).reshape(-1, dim)
    table._data = np.array(payload)
    for item in index["items"]:
        key = ItemKey(item["kind"], item["id"], item.get("sub_index"))
        offset = item["offset"]
        n = item["n_tokens"]
        if offset + n * dim * 4 > len(raw) or offset < HEADER_SIZE:
            raise ValueError(f"offset out of bounds for {key}")
        if key in table.items:
            raise ValueError(f"duplicate key {key}")
        table.items[key] = (n, offset)
    return table


def build_table(items: list[tuple[ItemKey, np.ndarray]], dim: int | None = None) -> EmbeddingTable:
    if not items:
        raise ValueError("no items")
    dim = dim if dim is not None else np.asarray(items[0][1]).shape[1]
    table = EmbeddingTable(dim)
    for key, matrix in items:
        table.add(key, matrix)
    return table


# ---------------------------------------------------------------------------
# deterministic synthetic embeddings

def hash64(token: str, seed: int) -> int:
    digest = hashlib.blake2b(
        token.encode("utf-8"), digest_size=8, salt=str(seed).encode()[:16]
    ).digest()
    return int.from_bytes(digest, "little")


def token_vector(token: str, seed: int, dim: int) -> np.ndarray:
    rng = np.random.default_rng(hash64(token.lower(), seed))
    return rng.uniform(-1.0, 1.0, size=dim)


def fake_embeddings(corpus: Corpus, seed: int, dim: int = 768,
                    concepts: list[Concept] | None = None) -> EmbeddingTable:
    """Context-free synthetic embeddings: one fixed vector per token string."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    cache: dict[str, np.ndarray] = {}

    def vec(token: str) -> np.ndarray:
        key = token.lower()
        if key not in cache:
            cache[key] = token_vector(key, seed, dim)
        return cache[key]

    def matrix(text: str) -> np.ndarray:
        toks = tokenize(text) or ["<empty>"]
        return np.stack([vec(t) for t in toks])

    table = EmbeddingTable(dim)
    for p in corpus.problems:
        table.add(ItemKey("problem", p.id), matrix(p.text))
        for s in p.sentences:
            table.add(ItemKey("sentence", p.id, s.index), matrix(s.text))
    for a in corpus.answers:
        table.add(ItemKey("answer", a.id), matrix(a.text))
    for c in concepts or []:
        table.add(ItemKey("concept", c.id), matrix(" ".join(c.definitions) or c.name))
    return table
