"""Heterogeneous concept/problem/answer graph, GCN, and link prediction."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .checkpoint import load_checkpoint, save_checkpoint
from .corpus import Concept, Corpus
from .embed_store import EmbeddingTable, ItemKey
from .kernels import adam, autodiff as ad
from .kernels.graphops import neighbor_sum
from .kernels.params import ParamSet

RELATIONS = (
    "problem-has-type",
    "problem-has-answer",
    "same-section-as",
    "mentioned-in-before-chapters",
    "same-chapter-as",
)

RELATION_SCHEMA = {
    "problem-has-type": ("problem", "concept"),
    "problem-has-answer": ("problem", "answer"),
    "same-section-as": ("concept", "concept"),
    "mentioned-in-before-chapters": ("concept", "concept"),
    "same-chapter-as": ("concept", "concept"),
}


@dataclass
class HeteroGraph:
    nodes: list[tuple[str, str]]  # (node_id, kind)
    edges: list[tuple[int, int, str]]  # stored once; queries are symmetric
    features: np.ndarray  # n x m

    node_index: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.node_index:
            self.node_index = {nid: i for i, (nid, _k) in enumerate(self.nodes)}

    def kind_of(self, idx: int) -> str:
        return self.nodes[idx][1]

    def directed_edges_with_self_loops(self) -> tuple[np.ndarray, np.ndarray]:
        """Both directions of every stored edge plus one self-loop per node."""
        n = len(self.nodes)
        src = [u for u, v, _r in self.edges] + [v for u, v, _r in self.edges]
        dst = [v for u, v, _r in self.edges] + [u for u, v, _r in self.edges]
        src += list(range(n))
        dst += list(range(n))
        return np.asarray(src, dtype=np.int64), np.asarray(dst, dtype=np.int64)

    def counts(self) -> dict:
        node_counts: dict[str, int] = {}
        for _nid, kind in self.nodes:
            node_counts[kind] = node_counts.get(kind, 0) + 1
        edge_counts: dict[str, int] = {}
        for _u, _v, rel in self.edges:
            edge_counts[rel] = edge_counts.get(rel, 0) + 1
        return {"nodes": node_counts, "edges": edge_counts,
                "total_nodes": len(self.nodes), "total_edges": len(self.edges)}


def build_graph(corpus: Corpus, concepts: list[Concept],
                table: EmbeddingTable) -> HeteroGraph:
    """One node per concept/problem/answer; edges per the relation schema.

    Concept-concept relations are exclusive: same (chapter, section) beats
    same chapter, which beats the cross-chapter ordering relation.
    """
    used_concepts = sorted({c for p in corpus.problems for c in p.concept_tags})
    by_id = {c.id: c for c in concepts}
    missing = [c for c in used_concepts if c not in by_id]
    if missing:
        raise ValueError(f"problem tags not in concept list: {missing}")

    nodes: list[tuple[str, str]] = []
    feats: list[np.ndarray] = []
    for cid in used_concepts:
        nodes.append((f"concept:{cid}", "concept"))
        feats.append(table.pooled(ItemKey("concept", cid)))
    for p in sorted(corpus.problems, key=lambda p: p.id):
        nodes.append((f"problem:{p.id}", "problem"))
        feats.append(table.pooled(ItemKey("problem", p.id)))
    for a in sorted(corpus.answers, key=lambda a: a.id):
        nodes.append((f"answer:{a.id}", "answer"))
        feats.append(table.pooled(ItemKey("answer", a.id)))

    index = {nid: i for i, (nid, _k) in enumerate(nodes)}
    edges: list[tuple[int, int, str]] = []
    for p in sorted(corpus.problems, key=lambda p: p.id):
        pi = index[f"problem:{p.id}"]
        for cid in sorted(p.concept_tags):
            edges.append((pi, index[f"concept:{cid}"], "problem-has-type"))
        edges.append((pi, index[f"answer:{p.answer_id}"], "problem-has-answer"))
    for i, a in enumerate(used_concepts):
        for b in used_concepts[i + 1 :]:
            ca, cb = by_id[a], by_id[b]
            ia, ib = index[f"concept:{a}"], index[f"concept:{b}"]
            if ca.chapter == cb.chapter and ca.section == cb.section:
                edges.append((ia, ib, "same-section-as"))
            elif ca.chapter == cb.chapter:
                edges.append((ia, ib, "same-chapter-as"))
            else:
                edges.append((ia, ib, "mentioned-in-before-chapters"))
    return HeteroGraph(nodes=nodes, edges=edges, features=np.asarray(feats))


@dataclass
class GcnConfig:
    layers: int = 3
    hidden: int = 100
    lr: float = 1e-3
    epochs: int = 200
    seed: int = 0

    def as_dict(self) -> dict:
        return {"task": "gcn", "layers": self.layers, "hidden": self.hidden,
                "lr": self.lr, "epochs": self.epochs, "seed": self.seed}


class GcnModel:
    """K layers of h_u = f(sum over neighbors of (w x_v + b)), plain sums."""

    def __init__(self, cfg: GcnConfig, in_dim: int):
        if cfg.layers < 1:
            raise ValueError("need at least one layer")
        self.cfg = cfg
        self.in_dim = in_dim
        self.params = ParamSet(cfg.seed)
        dims = [in_dim] + [cfg.hidden] * cfg.layers
        for k in range(cfg.layers):
            self.params.add_weight(f"gcn.w{k}", (dims[k], dims[k + 1]))
            self.params.add_bias(f"gcn.b{k}", (dims[k + 1],))

    def forward(self, graph: HeteroGraph, activation=ad.relu) -> ad.Tensor:
        src, dst = graph.directed_edges_with_self_loops()
        h = ad.Tensor(graph.features)
        n = len(graph.nodes)
        for k in range(self.cfg.layers):
            msg = ad.add(
                ad.matmul(h, self.params[f"gcn.w{k}"]), self.params[f"gcn.b{k}"]
            )
            h = activation(neighbor_sum(msg, src, dst, n))
        return h

    def save(self, prefix, extra=None):
        save_checkpoint(
            prefix,
            {**self.cfg.as_dict(), "in_dim": self.in_dim},
            self.cfg.seed,
            self.params.state_arrays(),
            extra,
        )

    @classmethod
    def load(cls, prefix) -> "GcnModel":
        config, _seed, arrays, _extra = load_checkpoint(prefix)
        cfg = GcnConfig(layers=config["layers"], hidden=config["hidden"],
                        lr=config["lr"], epochs=config["epochs"], seed=config["seed"])
        model = cls(cfg, config["in_dim"])
        model.params.load_arrays(arrays)
        return model


def gcn_forward(graph: HeteroGraph, model: GcnModel) -> np.ndarray:
    return model.forward(graph).data


def gcn_forward_dense(graph: HeteroGraph, model: GcnModel) -> np.ndarray:
    """Brute-force oracle: explicit dense adjacency loops, self-loops included."""
    n = len(graph.nodes)
    adj = np.eye(n)
    for u, v, _r in graph.edges:
        adj[u, v] = 1.0
        adj[v, u] = 1.0
    h = graph.features.copy()
    for k in range(model.cfg.layers):
        w = model.params[f"gcn.w{k}"].data
        b = model.params[f"gcn.b{k}"].data
        msg = h @ w + b
        out = np.zeros((n, w.shape[1]))
        for u in range(n):
            for v in range(n):
                if adj[u, v]:
                    out[u] += msg[v]
        h = np.maximum(out, 0.0)
    return h


def score_link(h: np.ndarray, u: int, v: int) -> float:
    z = float(h[u] @ h[v])
    return 1.0 / (1.0 + np.exp(-z)) if z >= 0 else float(np.exp(z) / (1.0 + np.exp(z)))


def _has_type_pairs(graph: HeteroGraph, splits: dict[str, str] | None,
                    split: str | None) -> list[tuple[int, int]]:
    pairs = []
    for u, v, rel in graph.edges:
        if rel != "problem-has-type":
            continue
        pid = graph.nodes[u][0].split(":", 1)[1]
        if split is None or splits is None or splits.get(pid) == split:
            pairs.append((u, v))
    return pairs


def train_link_prediction(
    graph: HeteroGraph,
    cfg: GcnConfig,
    splits: dict[str, str] | None = None,
) -> tuple[GcnModel, dict]:
    """BCE over positive train problem-has-type edges plus per-epoch uniform
    negative (problem, concept) non-edges, one negative per positive."""
    model = GcnModel(cfg, graph.features.shape[1])
    positives = _has_type_pairs(graph, splits, "train" if splits else None)
    if not positives:
        raise ValueError("no positive problem-has-type training edges")
    dev_pairs = _has_type_pairs(graph, splits, "dev") if splits else []
    pos_set = {(u, v) for u, v in _has_type_pairs(graph, None, None)}
    problem_nodes = [i for i, (_n, k) in enumerate(graph.nodes) if k == "problem"]
    concept_nodes = [i for i, (_n, k) in enumerate(graph.nodes) if k == "concept"]
    rng = np.random.default_rng(cfg.seed)
    state = adam.AdamState(model.params, lr=cfg.lr)
    log: list[dict] = []
    t0 = time.perf_counter()
    for _epoch in range(cfg.epochs):
        negatives: list[tuple[int, int]] = []
        guard = 0
        while len(negatives) < len(positives) and guard < 100 * len(positives) + 100:
            u = problem_nodes[int(rng.integers(len(problem_nodes)))]
            v = concept_nodes[int(rng.integers(len(concept_nodes)))]
            guard += 1
            if (u, v) not in pos_set:
                negatives.append((u, v))
        model.params.zero_grad()
        h = model.forward(graph)
        pairs = positives + negatives
        hu = ad.gather_rows(h, np.array([u for u, _v in pairs]))
        hv = ad.gather_rows(h, np.array([v for _u, v in pairs]))
        logits = ad.tsum(ad.mul(hu, hv), axis=1)
        targets = np.array([1.0] * len(positives) + [0.0] * len(negatives))
        loss = ad.bce_with_logits(logits, targets) / len(pairs)
        loss.backward()
        adam.adam_step(model.params, state)
        entry = {"loss": float(loss.data)}
        if dev_pairs:
            hh = h.data
            entry["dev_mean_pos_score"] = float(
                np.mean([score_link(hh, u, v) for u, v in dev_pairs])
            )
        log.append(entry)
    return model, {"log": log, "train_seconds": time.perf_counter() - t0}


def context_of(graph: HeteroGraph, model: GcnModel, problem_id: str) -> np.ndarray:
    """The problem node's final-layer GCN embedding."""
    node_id = f"problem:{problem_id}"
    if node_id not in graph.node_index:
        raise KeyError(f"no problem node for id {problem_id!r}")
    return gcn_forward(graph, model)[graph.node_index[node_id]]


def all_problem_contexts(graph: HeteroGraph, model: GcnModel) -> dict[str, np.ndarray]:
    h = gcn_forward(graph, model)
    return {
        nid.split(":", 1)[1]: h[i]
        for i, (nid, kind) in enumerate(graph.nodes)
        if kind == "problem"
    }


def export_graph(graph: HeteroGraph, out_dir: str | Path):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with (out / "nodes.jsonl").open("w", encoding="utf-8") as fh:
        for nid, kind in graph.nodes:
            fh.write(json.dumps({"id": nid, "kind": kind}) + "\n")
    with (out / "edges.jsonl").open("w", encoding="utf-8") as fh:
        for u, v, rel in graph.edges:
            fh.write(
                json.dumps(
                    {"u": graph.nodes[u][0], "v": graph.nodes[v][0], "relation": rel}
                )
                + "\n"
            )


def graph_stats_csv(graph: HeteroGraph) -> str:
    counts = graph.counts()
    lines = ["kind,count"]
    for kind in ("concept", "problem", "answer"):
        lines.append(f"node:{kind},{counts['nodes'].get(kind, 0)}")
    for rel in RELATIONS:
        lines.append(f"edge:{rel},{counts['edges'].get(rel, 0)}")
    lines.append(f"node:total,{counts['total_nodes']}")
    lines.append(f"edge:total,{counts['total_edges']}")
    return "\n".join(lines) + "\n"
