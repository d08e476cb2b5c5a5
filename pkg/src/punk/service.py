"""REST annotation service backing the labeling UI."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel, Field

from .annotations import AnnotationStore, ConflictError, export_annotations, record_to_obj
from .corpus import Corpus


class SpanIn(BaseModel):
    sentence_index: int | None = None
    char_start: int
    char_end: int


class AnnotationIn(BaseModel):
    spans: list[SpanIn] = Field(default_factory=list)
    unclear: bool = False
    revision: int = 0


def _status(store: AnnotationStore, problem_id: str) -> str:
    rec = store.get(problem_id)
    if rec is None:
        return "unlabeled"
    return "unclear" if rec.unclear else "labeled"


def create_app(corpus: Corpus, store: AnnotationStore) -> FastAPI:
    app = FastAPI(title="unknown annotation service")
    problems = corpus.problem_by_id()
    ordered_ids = sorted(problems)

    @app.get("/api/problems")
    def list_problems(status: str | None = None, offset: int = 0, limit: int = 50):
        rows = [
            {
                "id": pid,
                "status": _status(store, pid),
                "n_sentences": len(problems[pid].sentences),
            }
            for pid in ordered_ids
        ]
        if status is not None:
            if status not in ("unlabeled", "labeled", "unclear"):
                raise HTTPException(422, detail=f"unknown status {status!r}")
            rows = [r for r in rows if r["status"] == status]
        total = len(rows)
        return {"total": total, "offset": offset, "items": rows[offset : offset + limit]}

    @app.get("/api/problems/{problem_id}")
    def get_problem(problem_id: str):
        p = problems.get(problem_id)
        if p is None:
            raise HTTPException(404, detail=f"no problem {problem_id!r}")
        rec = store.get(problem_id)
        return {
            "id": p.id,
            "text": p.text,
            "sentences": [
                {"index": s.index, "text": s.text, "char_span": list(s.char_span)}
                for s in p.sentences
            ],
            "annotation": record_to_obj(rec) if rec else None,
            "revision": store.revision_of(problem_id),
        }

    @app.put("/api/problems/{problem_id}/annotation")
    def put_annotation(problem_id: str, body: AnnotationIn):
        p = problems.get(problem_id)
        if p is None:
            raise HTTPException(404, detail=f"no problem {problem_id!r}")
        spans = []
        for s in body.spans:
            if not (0 <= s.char_start < s.char_end <= len(p.text)):
                raise HTTPException(
                    422,
                    detail=f"span [{s.char_start}, {s.char_end}) out of bounds "
                    f"for problem of length {len(p.text)}",
                )
            text = p.text[s.char_start : s.char_end]
            if not text.strip():
                raise HTTPException(
                    422,
                    detail=f"span [{s.char_start}, {s.char_end}) selects no text",
                )
            si = s.sentence_index
            containing = [
                sent.index
                for sent in p.sentences
                if s.char_start < sent.char_span[1] and s.char_end > sent.char_span[0]
            ]
            if not containing:
                raise HTTPException(
                    422,
                    detail=f"span [{s.char_start}, {s.char_end}) overlaps no sentence",
                )
            if si is None:
                si = containing[0]
            elif si not in containing:
                raise HTTPException(
                    422,
                    detail=f"span [{s.char_start}, {s.char_end}) does not overlap "
                    f"sentence {si}",
                )
            spans.append((si, s.char_start, s.char_end, text))
        try:
            rec = store.put(p, spans, body.unclear, body.revision)
        except ConflictError as exc:
            raise HTTPException(409, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(422, detail=str(exc))
        return {"ok": True, "revision": rec.revision,
                "sentence_labels": rec.sentence_labels}

    @app.get("/api/export", response_class=PlainTextResponse)
    def export():
        return export_annotations(store.records)

    @app.get("/api/progress")
    def progress():
        counts = {"unlabeled": 0, "labeled": 0, "unclear": 0}
        for pid in ordered_ids:
            counts[_status(store, pid)] += 1
        counts["total"] = len(ordered_ids)
        return counts

    return app


def serve_annotation(port: int, corpus: Corpus, store: AnnotationStore):
    import uvicorn

    uvicorn.run(create_app(corpus, store), host="127.0.0.1", port=port)
