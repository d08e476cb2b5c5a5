"""Orchestration: encode every corpus item and emit data + index + manifest."""

from __future__ import annotations

import json
from pathlib import Path

from .corpus_io import corpus_fingerprint, load_concepts_file, load_corpus_dir
from .writer import TableWriter

EXPECTED_DIM = 768


def export_embeddings(
    corpus_dir: str | Path,
    encoder,
    out_prefix: str | Path,
    concepts_path: str | Path | None = None,
    expected_dim: int = EXPECTED_DIM,
) -> dict:
    """Encode problems, sentences, answers, and concept definitions.

    Returns the manifest, which is also written to <out_prefix>.manifest.json.
    """
    if encoder.dim != expected_dim:
        raise ValueError(
            f"encoder produces dim {encoder.dim}, expected {expected_dim}"
        )
    problems, answers = load_corpus_dir(corpus_dir)
    concepts = load_concepts_file(concepts_path) if concepts_path else []

    writer = TableWriter(encoder.dim)

    def encode_item(kind: str, item_id: str, sub_index, text: str):
        if not text.strip():
            raise ValueError(f"empty item ({kind}, {item_id}, {sub_index})")
        writer.add(kind, item_id, sub_index, encoder.encode(text))

    for p in problems:
        encode_item("problem", p.id, None, p.text)
        for i, sentence in enumerate(p.sentences):
            encode_item("sentence", p.id, i, sentence)
    for a in answers:
        encode_item("answer", a.id, None, a.text)
    for c in concepts:
        encode_item("concept", c.id, None, c.definition_text())

    writer.write(out_prefix)
    manifest = {
        "encoder": encoder.name,
        "encoder_version": encoder.version(),
        "tokenization": encoder.tokenization,
        "deterministic": encoder.deterministic,
        "corpus_fingerprint": corpus_fingerprint(corpus_dir),
        "dim": encoder.dim,
        "n_items": len(writer.index),
    }
    Path(f"{out_prefix}.manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8"
    )
    return manifest
