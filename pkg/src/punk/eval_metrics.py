"""Macro-averaged F1 with the 0/0 -> 0 convention, and run reports."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path


@dataclass
class ClassScore:
    name: str
    precision: float
    recall: float
    f1: float
    support: int


@dataclass
class EvalReport:
    task: str
    split: str
    classes: list[ClassScore]
    macro_f1: float
    seed: int | None = None
    config: dict = field(default_factory=dict)
    train_seconds: float | None = None

    def to_json(self) -> str:
        return json.dumps(
            {
                "task": self.task,
                "split": self.split,
                "classes": [
                    {
                        "name": c.name,
                        "p": c.precision,
                        "r": c.recall,
                        "f1": c.f1,
                        "support": c.support,
                    }
                    for c in self.classes
                ],
                "macro_f1": self.macro_f1,
                "seed": self.seed,
                "config": self.config,
                "train_seconds": self.train_seconds,
            },
            sort_keys=True,
        )

    def save(self, path: str | Path):
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")


def _safe_div(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def per_class_scores(golds, preds, classes) -> list[ClassScore]:
    """Per-class precision/recall/F1 over label sets or scalar labels.

    `golds`/`preds` are aligned sequences; each element is either a scalar
    label or a set of labels (multi-label indicator semantics).
    """
    if len(golds) != len(preds):
        raise ValueError(f"length mismatch: {len(golds)} golds vs {len(preds)} preds")

    def as_set(x):
        return x if isinstance(x, (set, frozenset)) else {x}

    scores = []
    for c in classes:
        tp = fp = fn = support = 0
        for g, p in zip(golds, preds):
            g_has = c in as_set(g)
            p_has = c in as_set(p)
            if g_has:
                support += 1
            if g_has and p_has:
                tp += 1
            elif p_has:
                fp += 1
            elif g_has:
                fn += 1
        precision = _safe_div(tp, tp + fp)
        recall = _safe_div(tp, tp + fn)
        f1 = _safe_div(2 * precision * recall, precision + recall)
        scores.append(ClassScore(str(c), precision, recall, f1, support))
    return scores


def macro_f1(golds, preds, classes) -> float:
    """Unweighted mean of per-class F1 over the declared class set."""
    scores = per_class_scores(golds, preds, classes)
    return sum(s.f1 for s in scores) / len(scores)


def evaluate_unknown_run(
    predictions: dict[str, list[int]],
    corpus,
    annotations: dict,
    split: str,
    seed=None,
    config=None,
    train_seconds=None,
) -> EvalReport:
    """Sentence-level macro F1 over both classes {0, 1} on one split.

    Unclear-flagged problems are excluded. `predictions` maps problem id to
    per-sentence 0/1 predictions.
    """
    golds: list[int] = []
    preds: list[int] = []
    problems = [p for p in corpus.split_problems(split)]
    if not problems:
        raise ValueError(f"split {split!r} is empty")
    for p in problems:
        rec = annotations.get(p.id)
        if rec is None:
            raise ValueError(f"split problem {p.id} has no labels")
        if rec.unclear:
            continue
        pred = predictions[p.id]
        if len(pred) != len(p.sentences):
            raise ValueError(f"problem {p.id}: prediction length mismatch")
        golds.extend(rec.sentence_labels)
        preds.extend(pred)
    return make_report("unknown", split, golds, preds, [0, 1], seed=seed,
                       config=config, train_seconds=train_seconds)


def evaluate_concept_run(
    model,
    corpus,
    table,
    split: str,
    classes: list[str],
    seed=None,
    config=None,
    train_seconds=None,
) -> EvalReport:
    """Multi-label concept macro F1 (per-class over the label indicator)."""
    problems = corpus.split_problems(split)
    if not problems:
        raise ValueError(f"split {split!r} is empty")
    golds = [set(p.concept_tags) for p in problems]
    preds = [model.predict(p, table) for p in problems]
    return make_report("concept", split, golds, preds, classes, seed=seed,
                       config=config, train_seconds=train_seconds)


def make_report(task: str, split: str, golds, preds, classes, seed=None,
                config=None, train_seconds=None) -> EvalReport:
    scores = per_class_scores(golds, preds, classes)
    return EvalReport(
        task=task,
        split=split,
        classes=scores,
        macro_f1=sum(s.f1 for s in scores) / len(scores),
        seed=seed,
        config=config or {},
        train_seconds=train_seconds,
    )
