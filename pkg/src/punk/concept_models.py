"""Multi-label concept classification and prototypical networks."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .checkpoint import load_checkpoint, save_checkpoint
from .corpus import Concept, Corpus, Problem
from .embed_store import EmbeddingTable, ItemKey
from .kernels import adam, autodiff as ad, encoders
from .kernels.params import ParamSet

DEFAULT_EPOCHS = {"maxent": 300, "mlp": 300, "lstm": 300, "gru": 300, "cnn": 20}


@dataclass
class ConceptModelConfig:
    encoder: str = "cnn"  # maxent | mlp | lstm | gru | cnn
    widths: list[int] = field(default_factory=lambda: [3, 4, 5, 6])
    kernels_per_width: int = 192
    hidden: int = 384
    mlp_hidden: int = 512
    mlp_layers: int = 3
    epochs: int | None = None
    lr: float = 1e-3
    dropout: float = 0.0
    seed: int = 0

    def resolved_epochs(self) -> int:
        return self.epochs if self.epochs is not None else DEFAULT_EPOCHS[self.encoder]

    def as_dict(self) -> dict:
        return {
            "task": "concept",
            "encoder": self.encoder,
            "widths": self.widths,
            "kernels_per_width": self.kernels_per_width,
            "hidden": self.hidden,
            "mlp_hidden": self.mlp_hidden,
            "mlp_layers": self.mlp_layers,
            "epochs": self.resolved_epochs(),
            "lr": self.lr,
            "dropout": self.dropout,
            "seed": self.seed,
        }


class ConceptModel:
    """Encoder plus per-concept sigmoid heads."""

    def __init__(self, cfg: ConceptModelConfig, in_dim: int, concept_ids: list[str]):
        self.cfg = cfg
        self.in_dim = in_dim
        self.concept_ids = list(concept_ids)
        self.params = ParamSet(cfg.seed)
        n_out = len(self.concept_ids)
        if cfg.encoder == "maxent":
            self.net = encoders.Mlp(in_dim, 0, 0, n_out, self.params, "head")
            self.seq = None
        elif cfg.encoder == "mlp":
            self.net = encoders.Mlp(
                in_dim, cfg.mlp_hidden, cfg.mlp_layers, n_out, self.params, "mlp"
            )
            self.seq = None
        else:
            enc_cfg = encoders.EncoderConfig(
                kind=cfg.encoder,
                widths=cfg.widths,
                kernels_per_width=cfg.kernels_per_width,
                hidden=cfg.hidden,
            )
            self.seq = encoders.make_sequence_encoder(enc_cfg, in_dim, self.params, "enc")
            self.net = encoders.Mlp(self.seq.out_dim, 0, 0, n_out, self.params, "head")

    def logits(self, problem: Problem, table: EmbeddingTable,
               rng: np.random.Generator | None = None) -> ad.Tensor:
        key = ItemKey("problem", problem.id)
        if self.seq is None:
            h = ad.Tensor(table.pooled(key))
        else:
            h = self.seq.encode(table.tokens(key).astype(np.float64))
        h = ad.dropout(h, self.cfg.dropout, rng)
        return self.net.forward(h)

    def predict(self, problem: Problem, table: EmbeddingTable) -> set[str]:
        """Concepts whose sigmoid score exceeds 0.5, i.e. positive logits."""
        z = self.logits(problem, table).data
        return {c for c, v in zip(self.concept_ids, z) if v > 0}

    def save(self, prefix, extra=None):
        save_checkpoint(
            prefix,
            {**self.cfg.as_dict(), "in_dim": self.in_dim, "concepts": self.concept_ids},
            self.cfg.seed,
            self.params.state_arrays(),
            extra,
        )

    @classmethod
    def load(cls, prefix) -> "ConceptModel":
        config, _seed, arrays, _extra = load_checkpoint(prefix)
        cfg = ConceptModelConfig(
            encoder=config["encoder"],
            widths=list(config["widths"]),
            kernels_per_width=config["kernels_per_width"],
            hidden=config["hidden"],
            mlp_hidden=config["mlp_hidden"],
            mlp_layers=config["mlp_layers"],
            epochs=config["epochs"],
            lr=config["lr"],
            dropout=config["dropout"],
            seed=config["seed"],
        )
        model = cls(cfg, config["in_dim"], config["concepts"])
        model.params.load_arrays(arrays)
        return model


def train_concept_classifier(
    corpus: Corpus,
    table: EmbeddingTable,
    cfg: ConceptModelConfig,
    concept_ids: list[str] | None = None,
) -> tuple[ConceptModel, dict]:
    """Trains per-concept sigmoid heads with summed binary cross-entropy."""
    train = corpus.split_problems("train")
    if not train:
        raise ValueError("empty training split")
    if concept_ids is None:
        concept_ids = sorted({c for p in corpus.problems for c in p.concept_tags})
    model = ConceptModel(cfg, table.dim, concept_ids)
    idx = {c: i for i, c in enumerate(concept_ids)}
    state = adam.AdamState(model.params, lr=cfg.lr)
    rng = np.random.default_rng(cfg.seed)
    order = sorted(train, key=lambda p: p.id)
    log: list[float] = []
    t0 = time.perf_counter()
    for _epoch in range(cfg.resolved_epochs()):
        total = 0.0
        for p in order:
            y = np.zeros(len(concept_ids))
            for c in p.concept_tags:
                y[idx[c]] = 1.0
            model.params.zero_grad()
            loss = ad.bce_with_logits(
                model.logits(p, table, rng if cfg.dropout > 0 else None), y
            )
            loss.backward()
            adam.adam_step(model.params, state)
            total += float(loss.data)
        log.append(total / len(order))
    return model, {"loss_per_epoch": log, "train_seconds": time.perf_counter() - t0}


def predict_concepts(model: ConceptModel, problem: Problem,
                     table: EmbeddingTable) -> set[str]:
    return model.predict(problem, table)


# ---------------------------------------------------------------------------
# prototypical networks

@dataclass
class EpisodeConfig:
    n_way: int | None = None  # None = all eligible classes
    support: int = 10
    query: int = 15
    episodes: int = 100


@dataclass
class PrototypeSet:
    vectors: dict[str, np.ndarray]
    support_ids: dict[str, list[str]]


def single_concept_problems(problems: list[Problem]) -> dict[str, list[Problem]]:
    by_class: dict[str, list[Problem]] = {}
    for p in problems:
        if len(p.concept_tags) == 1:
            by_class.setdefault(next(iter(p.concept_tags)), []).append(p)
    for plist in by_class.values():
        plist.sort(key=lambda p: p.id)
    return by_class


class PrototypeEncoder:
    """Sequence encoder used as the prototypical network's base model."""

    def __init__(self, cfg: ConceptModelConfig, in_dim: int):
        self.cfg = cfg
        self.in_dim = in_dim
        self.params = ParamSet(cfg.seed)
        enc_cfg = encoders.EncoderConfig(
            kind=cfg.encoder if cfg.encoder not in ("maxent", "mlp") else "cnn",
            widths=cfg.widths,
            kernels_per_width=cfg.kernels_per_width,
            hidden=cfg.hidden,
        )
        self.seq = encoders.make_sequence_encoder(enc_cfg, in_dim, self.params, "enc")
        self.out_dim = self.seq.out_dim

    def encode(self, problem: Problem, table: EmbeddingTable) -> ad.Tensor:
        return self.seq.encode(
            table.tokens(ItemKey("problem", problem.id)).astype(np.float64)
        )

    def encode_np(self, problem: Problem, table: EmbeddingTable) -> np.ndarray:
        return self.encode(problem, table).data

    def save(self, prefix, extra=None):
        save_checkpoint(
            prefix,
            {**self.cfg.as_dict(), "task": "prototype", "in_dim": self.in_dim},
            self.cfg.seed,
            self.params.state_arrays(),
            extra,
        )

    @classmethod
    def load(cls, prefix) -> "PrototypeEncoder":
        config, _seed, arrays, _extra = load_checkpoint(prefix)
        cfg = ConceptModelConfig(
            encoder=config["encoder"],
            widths=list(config["widths"]),
            kernels_per_width=config["kernels_per_width"],
            hidden=config["hidden"],
            seed=config["seed"],
            lr=config["lr"],
        )
        enc = cls(cfg, config["in_dim"])
        enc.params.load_arrays(arrays)
        return enc


def _check_eligible(by_class: dict[str, list[Problem]], needed: int) -> list[str]:
    eligible = sorted(c for c, ps in by_class.items() if len(ps) >= needed)
    short = sorted(c for c, ps in by_class.items() if len(ps) < needed)
    if not eligible:
        raise ValueError(
            f"no class has {needed} single-concept problems; too small: {short}"
        )
    return eligible


def train_prototypical(
    corpus: Corpus,
    table: EmbeddingTable,
    episode_cfg: EpisodeConfig,
    model_cfg: ConceptModelConfig,
    strict: bool = True,
) -> tuple[PrototypeEncoder, dict]:
    """Episodic training: softmax over negative squared prototype distances."""
    by_class = single_concept_problems(corpus.split_problems("train"))
    needed = episode_cfg.support + episode_cfg.query
    if strict:
        short = sorted(c for c, ps in by_class.items() if len(ps) < needed)
        if short:
            raise ValueError(
                f"classes with fewer than support+query={needed} single-concept "
                f"problems: {short}"
            )
    classes = _check_eligible(by_class, needed)
    encoder = PrototypeEncoder(model_cfg, table.dim)
    state = adam.AdamState(encoder.params, lr=model_cfg.lr)
    rng = np.random.default_rng(model_cfg.seed)
    losses: list[float] = []
    t0 = time.perf_counter()
    for _ep in range(episode_cfg.episodes):
        n_way = episode_cfg.n_way or len(classes)
        sampled = sorted(rng.choice(classes, size=min(n_way, len(classes)), replace=False))
        supports: list[list[Problem]] = []
        queries: list[list[Problem]] = []
        for c in sampled:
            picked = rng.choice(len(by_class[c]), size=needed, replace=False)
            items = [by_class[c][i] for i in picked]
            supports.append(items[: episode_cfg.support])
            queries.append(items[episode_cfg.support :])
        encoder.params.zero_grad()
        prototypes = []
        for sup in supports:
            enc = [encoder.encode(p, table) for p in sup]
            total = enc[0]
            for e in enc[1:]:
                total = ad.add(total, e)
            prototypes.append(total / len(enc))
        loss_terms = []
        for ci, qs in enumerate(queries):
            for q in qs:
                qe = encoder.encode(q, table)
                dists = []
                for proto in prototypes:
                    diff = ad.sub(qe, proto)
                    dists.append(ad.tsum(ad.mul(diff, diff)))
                logits = ad.stack_scalars([ad.mul(d, ad.Tensor(-1.0)) for d in dists])
                loss_terms.append(ad.sub(ad.logsumexp(logits), ad.pick(logits, ci)))
        loss = loss_terms[0]
        for t in loss_terms[1:]:
            loss = ad.add(loss, t)
        loss = loss / len(loss_terms)
        loss.backward()
        adam.adam_step(encoder.params, state)
        losses.append(float(loss.data))
    return encoder, {"episode_losses": losses, "classes": classes,
                     "train_seconds": time.perf_counter() - t0}


def build_prototypes(
    encoder: PrototypeEncoder,
    by_class: dict[str, list[Problem]],
    table: EmbeddingTable,
    support: int,
    rng: np.random.Generator,
) -> PrototypeSet:
    vectors: dict[str, np.ndarray] = {}
    support_ids: dict[str, list[str]] = {}
    for c in sorted(by_class):
        pool = by_class[c]
        k = min(support, len(pool))
        picked = rng.choice(len(pool), size=k, replace=False)
        items = [pool[i] for i in picked]
        vectors[c] = np.mean([encoder.encode_np(p, table) for p in items], axis=0)
        support_ids[c] = [p.id for p in items]
    return PrototypeSet(vectors=vectors, support_ids=support_ids)


def classify_by_prototype(
    query_vec: np.ndarray,
    prototypes: PrototypeSet,
    order_index: dict[str, int],
) -> str:
    """Nearest prototype by squared Euclidean distance; ties break toward the
    concept with the smallest order_index."""
    if not prototypes.vectors:
        raise ValueError("empty prototype set")
    best = None
    best_dist = None
    for c in sorted(prototypes.vectors, key=lambda c: order_index.get(c, 1 << 30)):
        d = float(np.sum((query_vec - prototypes.vectors[c]) ** 2))
        if best_dist is None or d < best_dist:
            best, best_dist = c, d
    return best


def pca_2d(points: np.ndarray) -> np.ndarray:
    """Project rows to the top-2 principal components.

    Deterministic sign: each component's first nonzero loading is positive.
    """
    centered = points - points.mean(axis=0, keepdims=True)
    _u, _s, vt = np.linalg.svd(centered, full_matrices=False)
    comps = vt[:2]
    if comps.shape[0] < 2:
        comps = np.vstack([comps, np.zeros((2 - comps.shape[0], points.shape[1]))])
    for i in range(2):
        nz = np.nonzero(np.abs(comps[i]) > 1e-12)[0]
        if nz.size and comps[i, nz[0]] < 0:
            comps[i] = -comps[i]
    return centered @ comps.T


def export_prototypes(
    encoder: PrototypeEncoder,
    corpus: Corpus,
    table: EmbeddingTable,
    concepts: list[Concept],
    trials: int,
    support: int = 10,
    seed: int = 0,
) -> list[dict]:
    """Prototypes and consistently-classified dev problems, projected to 2-D.

    A dev problem counts as a prototypical example iff its nearest prototype
    matches gold in at least 95% of the random support draws.
    """
    if trials < 20:
        raise ValueError("trials must be >= 20")
    order_index = {c.id: c.order_index for c in concepts}
    train_by_class = single_concept_problems(corpus.split_problems("train"))
    dev = [p for p in corpus.split_problems("dev") if len(p.concept_tags) == 1]
    rng = np.random.default_rng(seed)
    dev_vecs = {p.id: encoder.encode_np(p, table) for p in dev}
    correct = {p.id: 0 for p in dev}
    proto_sets = []
    for _t in range(trials):
        protos = build_prototypes(encoder, train_by_class, table, support, rng)
        proto_sets.append(protos)
        for p in dev:
            pred = classify_by_prototype(dev_vecs[p.id], protos, order_index)
            if pred == next(iter(p.concept_tags)):
                correct[p.id] += 1
    prototypical = [p for p in dev if correct[p.id] / trials >= 0.95]

    chosen: dict[str, np.ndarray] = {}
    for c in sorted(train_by_class):
        pick = int(rng.integers(0, trials))
        chosen[c] = proto_sets[pick].vectors[c]

    rows = []
    points = []
    for c in sorted(chosen):
        rows.append({"kind": "prototype", "concept_id": c, "problem_id": ""})
        points.append(chosen[c])
    for p in prototypical:
        rows.append(
            {
                "kind": "example",
                "concept_id": next(iter(p.concept_tags)),
                "problem_id": p.id,
            }
        )
        points.append(dev_vecs[p.id])
    coords = pca_2d(np.asarray(points))
    for row, (x, y) in zip(rows, coords):
        row["x"] = float(x)
        row["y"] = float(y)
    return rows


def prototype_rows_to_csv(rows: list[dict]) -> str:
    lines = ["kind,concept_id,x,y,problem_id"]
    for r in rows:
        lines.append(f"{r['kind']},{r['concept_id']},{r['x']!r},{r['y']!r},{r['problem_id']}")
    return "\n".join(lines) + "\n"
