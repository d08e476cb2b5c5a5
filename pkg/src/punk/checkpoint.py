"""Model checkpoints: JSON header plus the binary row payload convention."""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .embed_store import HEADER_SIZE, MAGIC


def save_checkpoint(prefix: str | Path, config: dict, seed: int,
                    arrays: dict[str, np.ndarray], extra: dict | None = None):
    prefix = Path(prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    names = list(arrays)
    header = {
        "config": config,
        "seed": seed,
        "shapes": {k: list(np.asarray(arrays[k]).shape) for k in names},
        "params": [],
        "extra": extra or {},
    }
    offset = HEADER_SIZE
    payload = bytearray()
    for name in names:
        flat = np.asarray(arrays[name], dtype="<f4").reshape(-1)
        header["params"].append({"name": name, "offset": offset, "n": int(flat.size)})
        payload += flat.tobytes()
        offset += flat.size * 4
    with open(f"{prefix}.bin", "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", 1))
        fh.write(bytes(payload))
    Path(f"{prefix}.json").write_text(
        json.dumps(header, sort_keys=True), encoding="utf-8"
    )


def load_checkpoint(prefix: str | Path) -> tuple[dict, int, dict[str, np.ndarray], dict]:
    prefix = Path(prefix)
    header = json.loads(Path(f"{prefix}.json").read_text(encoding="utf-8"))
    raw = Path(f"{prefix}.bin").read_bytes()
    if raw[: len(MAGIC)] != MAGIC:
        raise ValueError(f"{prefix}.bin: bad magic")
    arrays: dict[str, np.ndarray] = {}
    for item in header["params"]:
        start = item["offset"]
        flat = np.frombuffer(raw, dtype="<f4", count=item["n"], offset=start)
        arrays[item["name"]] = flat.astype(np.float64).reshape(
            header["shapes"][item["name"]]
        )
    return header["config"], header["seed"], arrays, header.get("extra", {})
