"""Annotation persistence: append-only JSONL journal with revisions."""

from __future__ import annotations

import json
import threading
from pathlib import Path

from .corpus import Corpus, Problem
from .unknown_extractor import AnnotationRecord, labels_from_spans


def record_to_obj(rec: AnnotationRecord) -> dict:
    return {
        "problem_id": rec.problem_id,
        "spans": [
            {"sentence_index": si, "char_start": s, "char_end": e, "text": t}
            for si, s, e, t in rec.spans
        ],
        "sentence_labels": list(rec.sentence_labels),
        "unclear": rec.unclear,
        "revision": rec.revision,
    }


def record_from_obj(obj: dict) -> AnnotationRecord:
    return AnnotationRecord(
        problem_id=obj["problem_id"],
        spans=[
            (s["sentence_index"], s["char_start"], s["char_end"], s["text"])
            for s in obj["spans"]
        ],
        sentence_labels=list(obj["sentence_labels"]),
        unclear=bool(obj.get("unclear", False)),
        revision=int(obj.get("revision", 1)),
    )


def export_annotations(records: dict[str, AnnotationRecord]) -> str:
    """Stable JSONL export ordered by problem_id."""
    lines = [
        json.dumps(record_to_obj(records[pid]), sort_keys=True, ensure_ascii=False)
        for pid in sorted(records)
    ]
    return "".join(line + "\n" for line in lines)


def load_annotations(source: str | Path) -> dict[str, AnnotationRecord]:
    records: dict[str, AnnotationRecord] = {}
    for line in Path(source).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        rec = record_from_obj(json.loads(line))
        records[rec.problem_id] = rec
    return records


class AnnotationStore:
    """Map problem_id -> AnnotationRecord, journaled to disk.

    Each put appends one JSONL line; load replays the journal so the last
    line per problem wins. Revisions increase monotonically per record.
    """

    def __init__(self, journal_path: str | Path):
        self.journal_path = Path(journal_path)
        self.records: dict[str, AnnotationRecord] = {}
        self._lock = threading.Lock()
        if self.journal_path.exists():
            for line in self.journal_path.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    rec = record_from_obj(json.loads(line))
                    self.records[rec.problem_id] = rec

    def get(self, problem_id: str) -> AnnotationRecord | None:
        return self.records.get(problem_id)

    def revision_of(self, problem_id: str) -> int:
        rec = self.records.get(problem_id)
        return rec.revision if rec else 0

    def put(self, problem: Problem, spans: list[tuple[int, int, int, str]],
            unclear: bool, base_revision: int) -> AnnotationRecord:
        """Optimistic write: fails with ConflictError when base_revision is
        stale. Validates the record against the problem before persisting."""
        with self._lock:
            current = self.revision_of(problem.id)
            if base_revision != current:
                raise ConflictError(
                    f"problem {problem.id}: revision {base_revision} is stale "
                    f"(current {current})"
                )
            rec = AnnotationRecord(
                problem_id=problem.id,
                spans=spans,
                sentence_labels=labels_from_spans(problem, spans),
                unclear=unclear,
                revision=current + 1,
            )
            rec.validate(problem)
            self.journal_path.parent.mkdir(parents=True, exist_ok=True)
            with self.journal_path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(record_to_obj(rec), sort_keys=True,
                                    ensure_ascii=False) + "\n")
            self.records[problem.id] = rec
            return rec

    def compact(self):
        """Rewrite the journal with one line per problem."""
        with self._lock:
            tmp = self.journal_path.with_suffix(".tmp")
            tmp.write_text(export_annotations(self.records), encoding="utf-8")
            tmp.replace(self.journal_path)

    def import_records(self, records: dict[str, AnnotationRecord], corpus: Corpus):
        by_id = corpus.problem_by_id()
        with self._lock:
            for pid in sorted(records):
                if pid in by_id:
                    records[pid].validate(by_id[pid])
                self.records[pid] = records[pid]
            tmp = self.journal_path.with_suffix(".tmp")
            tmp.write_text(export_annotations(self.records), encoding="utf-8")
            tmp.parent.mkdir(parents=True, exist_ok=True)
            tmp.replace(self.journal_path)


class ConflictError(Exception):
    pass
