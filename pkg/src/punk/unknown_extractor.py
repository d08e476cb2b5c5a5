"""Sentence-level unknown detection over context/sentence encoder pairs."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .checkpoint import load_checkpoint, save_checkpoint
from .corpus import Corpus, Problem
from .embed_store import EmbeddingTable, ItemKey
from .kernels import adam, autodiff as ad, encoders
from .kernels.params import ParamSet

CONTEXT_KINDS = ("none", "bow", "cnn", "cnn+graph")
SENTENCE_KINDS = ("bow", "cnn", "lstm", "gru")


@dataclass
class AnnotationRecord:
    problem_id: str
    spans: list[tuple[int, int, int, str]]  # (sentence_index, start, end, text)
    sentence_labels: list[int]
    unclear: bool = False
    revision: int = 1

    def validate(self, problem: Problem):
        if len(self.sentence_labels) != len(problem.sentences):
            raise ValueError(
                f"problem {problem.id}: {len(self.sentence_labels)} labels for "
                f"{len(problem.sentences)} sentences"
            )
        for si, start, end, text in self.spans:
            if not (0 <= start < end <= len(problem.text)):
                raise ValueError(
                    f"problem {problem.id}: span [{start}, {end}) out of bounds"
                )
            if problem.text[start:end] != text:
                raise ValueError(
                    f"problem {problem.id}: span text mismatch at [{start}, {end})"
                )
            if not (0 <= si < len(problem.sentences)):
                raise ValueError(f"problem {problem.id}: bad sentence index {si}")
        for si, s in enumerate(problem.sentences):
            overlapped = any(
                start < s.char_span[1] and end > s.char_span[0]
                for _si, start, end, _t in self.spans
            )
            if overlapped and self.sentence_labels[si] != 1:
                raise ValueError(
                    f"problem {problem.id}: sentence {si} overlapped by a span "
                    "but labeled 0"
                )


def labels_from_spans(problem: Problem,
                      spans: list[tuple[int, int, int, str]]) -> list[int]:
    labels = []
    for s in problem.sentences:
        hit = any(
            start < s.char_span[1] and end > s.char_span[0]
            for _si, start, end, _t in spans
        )
        labels.append(1 if hit else 0)
    return labels


@dataclass
class SentenceInstance:
    problem_id: str
    sentence_index: int
    label: int


def build_sentence_dataset(
    corpus: Corpus, annotations: dict[str, AnnotationRecord]
) -> list[SentenceInstance]:
    """One instance per sentence of every non-unclear annotated problem."""
    instances: list[SentenceInstance] = []
    for p in sorted(corpus.problems, key=lambda p: p.id):
        rec = annotations.get(p.id)
        if rec is None:
            continue
        if rec.unclear:
            continue
        if len(rec.sentence_labels) != len(p.sentences):
            raise ValueError(
                f"problem {p.id}: annotation has {len(rec.sentence_labels)} labels "
                f"but the problem has {len(p.sentences)} sentences"
            )
        for s in p.sentences:
            instances.append(SentenceInstance(p.id, s.index, rec.sentence_labels[s.index]))
    return instances


@dataclass
class UnknownModelConfig:
    context_kind: str = "cnn"  # none | bow | cnn | cnn+graph
    sentence_kind: str = "cnn"  # bow | cnn | lstm | gru
    use_mlp_head: bool = False  # route vectors through a 3-layer 512-wide MLP
    widths: list[int] = field(default_factory=lambda: [1, 2])
    kernels_per_width: int = 192
    hidden: int = 384
    mlp_hidden: int = 512
    mlp_layers: int = 3
    graph_dim: int = 100
    epochs: int = 30
    lr: float = 1e-3
    dropout: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if self.context_kind not in CONTEXT_KINDS:
            raise ValueError(f"bad context kind {self.context_kind!r}")
        if self.sentence_kind not in SENTENCE_KINDS:
            raise ValueError(f"bad sentence kind {self.sentence_kind!r}")

    def as_dict(self) -> dict:
        return {
            "task": "unknown",
            "context_kind": self.context_kind,
            "sentence_kind": self.sentence_kind,
            "use_mlp_head": self.use_mlp_head,
            "widths": self.widths,
            "kernels_per_width": self.kernels_per_width,
            "hidden": self.hidden,
            "mlp_hidden": self.mlp_hidden,
            "mlp_layers": self.mlp_layers,
            "graph_dim": self.graph_dim,
            "epochs": self.epochs,
            "lr": self.lr,
            "dropout": self.dropout,
            "seed": self.seed,
        }


def _encoder_cfg(kind: str, cfg: UnknownModelConfig) -> encoders.EncoderConfig:
    return encoders.EncoderConfig(
        kind=kind,
        widths=cfg.widths,
        kernels_per_width=cfg.kernels_per_width,
        hidden=cfg.hidden,
    )


class UnknownModel:
    """p_u = sigmoid(w . [c_i ; x_ij] + b), with configurable encoders."""

    def __init__(self, cfg: UnknownModelConfig, in_dim: int):
        self.cfg = cfg
        self.in_dim = in_dim
        self.params = ParamSet(cfg.seed)
        self.ctx_enc = None
        ctx_dim = 0
        if cfg.context_kind in ("bow",):
            self.ctx_enc = encoders.BowEncoder(in_dim)
            ctx_dim = in_dim
        elif cfg.context_kind in ("cnn", "cnn+graph"):
            self.ctx_enc = encoders.ConvTextEncoder(
                _encoder_cfg("cnn", cfg), in_dim, self.params, "ctx"
            )
            ctx_dim = self.ctx_enc.out_dim
            if cfg.context_kind == "cnn+graph":
                ctx_dim += cfg.graph_dim
        self.sent_enc = encoders.make_sequence_encoder(
            _encoder_cfg(cfg.sentence_kind, cfg), in_dim, self.params, "sent"
        )
        self.head_in_dim = ctx_dim + self.sent_enc.out_dim
        if cfg.use_mlp_head:
            self.head = encoders.Mlp(
                self.head_in_dim, cfg.mlp_hidden, cfg.mlp_layers, 1, self.params, "head"
            )
        else:
            self.head = encoders.Mlp(self.head_in_dim, 0, 0, 1, self.params, "head")

    def _feature(self, problem: Problem, sentence_index: int, table: EmbeddingTable,
                 contexts: dict[str, np.ndarray] | None,
                 rng: np.random.Generator | None = None) -> ad.Tensor:
        parts: list[ad.Tensor] = []
        if self.cfg.context_kind != "none":
            if isinstance(self.ctx_enc, encoders.BowEncoder):
                c = self.ctx_enc.encode(table.pooled(ItemKey("problem", problem.id))[None, :])
            else:
                c = self.ctx_enc.encode(
                    table.tokens(ItemKey("problem", problem.id)).astype(np.float64)
                )
            c = ad.dropout(c, self.cfg.dropout, rng)
            parts.append(c)
            if self.cfg.context_kind == "cnn+graph":
                if contexts is None or problem.id not in contexts:
                    raise ValueError(
                        f"graph context required but missing for problem {problem.id}"
                    )
                parts.append(ad.Tensor(contexts[problem.id]))
        key = ItemKey("sentence", problem.id, sentence_index)
        if isinstance(self.sent_enc, encoders.BowEncoder):
            x = self.sent_enc.encode(table.pooled(key)[None, :])
        else:
            x = self.sent_enc.encode(table.tokens(key).astype(np.float64))
        x = ad.dropout(x, self.cfg.dropout, rng)
        parts.append(x)
        return ad.concat(parts) if len(parts) > 1 else parts[0]

    def logit(self, problem: Problem, sentence_index: int, table: EmbeddingTable,
              contexts=None, rng=None) -> ad.Tensor:
        feat = self._feature(problem, sentence_index, table, contexts, rng)
        return self.head.forward(feat)

    def score(self, problem: Problem, sentence_index: int, table: EmbeddingTable,
              contexts=None) -> float:
        z = float(self.logit(problem, sentence_index, table, contexts).data[0])
        return 1.0 / (1.0 + np.exp(-z)) if z >= 0 else float(np.exp(z) / (1 + np.exp(z)))

    def save(self, prefix, extra=None):
        save_checkpoint(
            prefix,
            {**self.cfg.as_dict(), "in_dim": self.in_dim},
            self.cfg.seed,
            self.params.state_arrays(),
            extra,
        )

    @classmethod
    def load(cls, prefix) -> "UnknownModel":
        config, _seed, arrays, _extra = load_checkpoint(prefix)
        cfg = UnknownModelConfig(
            context_kind=config["context_kind"],
            sentence_kind=config["sentence_kind"],
            use_mlp_head=config["use_mlp_head"],
            widths=list(config["widths"]),
            kernels_per_width=config["kernels_per_width"],
            hidden=config["hidden"],
            mlp_hidden=config["mlp_hidden"],
            mlp_layers=config["mlp_layers"],
            graph_dim=config["graph_dim"],
            epochs=config["epochs"],
            lr=config["lr"],
            dropout=config["dropout"],
            seed=config["seed"],
        )
        model = cls(cfg, config["in_dim"])
        model.params.load_arrays(arrays)
        return model


def score_sentence(model: UnknownModel, problem: Problem, sentence_index: int,
                   table: EmbeddingTable, contexts=None) -> float:
    return model.score(problem, sentence_index, table, contexts)


def train_unknown_model(
    dataset: list[SentenceInstance],
    corpus: Corpus,
    table: EmbeddingTable,
    cfg: UnknownModelConfig,
    contexts: dict[str, np.ndarray] | None = None,
) -> tuple[UnknownModel, dict]:
    """Minimizes full binary cross-entropy with Adam; deterministic per seed."""
    if not dataset:
        raise ValueError("empty dataset")
    if cfg.context_kind == "cnn+graph" and contexts is None:
        raise ValueError("cnn+graph context requires trained graph contexts")
    problems = corpus.problem_by_id()
    model = UnknownModel(cfg, table.dim)
    state = adam.AdamState(model.params, lr=cfg.lr)
    rng = np.random.default_rng(cfg.seed)
    order = sorted(dataset, key=lambda i: (i.problem_id, i.sentence_index))
    log: list[float] = []
    t0 = time.perf_counter()
    for _epoch in range(cfg.epochs):
        total = 0.0
        for inst in order:
            p = problems[inst.problem_id]
            model.params.zero_grad()
            z = model.logit(p, inst.sentence_index, table, contexts,
                            rng if cfg.dropout > 0 else None)
            loss = ad.bce_with_logits(z, np.array([float(inst.label)]))
            loss.backward()
            adam.adam_step(model.params, state)
            total += float(loss.data)
        log.append(total / len(order))
    return model, {"loss_per_epoch": log, "train_seconds": time.perf_counter() - t0}


def extract_unknowns(
    model: UnknownModel, problem: Problem, table: EmbeddingTable, contexts=None
) -> list[tuple[int, float, bool]]:
    """(sentence index, p_u, flagged) per sentence, in order."""
    out = []
    for s in problem.sentences:
        p_u = model.score(problem, s.index, table, contexts)
        out.append((s.index, p_u, p_u > 0.5))
    return out


# ---------------------------------------------------------------------------
# non-learning baselines

def baseline_nth(problems: list[Problem], n: int) -> dict[str, list[int]]:
    """Sentence n-1 (0-based) predicted 1, all others 0."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return {
        p.id: [1 if s.index == n - 1 else 0 for s in p.sentences] for p in problems
    }


def baseline_last(problems: list[Problem]) -> dict[str, list[int]]:
    return {
        p.id: [1 if s.index == len(p.sentences) - 1 else 0 for s in p.sentences]
        for p in problems
    }


def baseline_majority(problems: list[Problem]) -> dict[str, list[int]]:
    return {p.id: [0] * len(p.sentences) for p in problems}
