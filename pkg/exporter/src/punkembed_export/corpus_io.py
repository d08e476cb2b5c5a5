"""Readers for the corpus and concept JSONL files the exporter consumes."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path


@dataclass
class ProblemRow:
    id: str
    text: str
    sentences: list[str]
    answer_id: str


@dataclass
class AnswerRow:
    id: str
    text: str


@dataclass
class ConceptRow:
    id: str
    name: str
    definitions: list[str] = field(default_factory=list)

    def definition_text(self) -> str:
        return " ".join(self.definitions) or self.name


def _read_jsonl(path: Path) -> list[dict]:
    rows = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.strip():
            rows.append(json.loads(line))
    return rows


def load_corpus_dir(corpus_dir: str | Path) -> tuple[list[ProblemRow], list[AnswerRow]]:
    corpus_dir = Path(corpus_dir)
    problems = [
        ProblemRow(
            id=row["id"],
            text=row["text"],
            sentences=[s["text"] for s in row["sentences"]],
            answer_id=row["answer_id"],
        )
        for row in _read_jsonl(corpus_dir / "problems.jsonl")
    ]
    answers = [
        AnswerRow(id=row["id"], text=row["text"])
        for row in _read_jsonl(corpus_dir / "answers.jsonl")
    ]
    return problems, answers


def load_concepts_file(path: str | Path) -> list[ConceptRow]:
    return [
        ConceptRow(
            id=row["id"],
            name=row["name"],
            definitions=list(row.get("definitions") or []),
        )
        for row in _read_jsonl(Path(path))
    ]


def corpus_fingerprint(corpus_dir: str | Path) -> str:
    """Stable hex digest over the corpus files, for the manifest."""
    import hashlib

    digest = hashlib.sha256()
    for name in ("problems.jsonl", "answers.jsonl"):
        digest.update(name.encode())
        digest.update((Path(corpus_dir) / name).read_bytes())
    return digest.hexdigest()
