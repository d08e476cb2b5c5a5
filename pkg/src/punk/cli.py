"""Command-line entry points for the whole pipeline."""

from __future__ import annotations

import json
import shutil
import sys
from collections import Counter
from pathlib import Path

import click

from . import annotations as ann_io
from . import concept_models, corpus as corpus_mod, embed_store, eval_metrics
from . import problem_graph, unknown_extractor
from .annotations import AnnotationStore
from .corpus import Corpus, load_concepts, load_corpus, save_corpus, shipped_concepts_path


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _read_table(prefix: str) -> embed_store.EmbeddingTable:
    return embed_store.read_table(prefix)


@click.group()
def main():
    """Probability problem understanding pipeline."""


@main.command()
@click.option("--dump", required=True, help="XML rows dump or JSONL mirror")
@click.option("--policy", default="default", help="'default' or a JSON policy file")
@click.option("--concepts", "concepts_path", default=None, help="concept JSONL (defaults to shipped)")
@click.option("--out", required=True)
def ingest(dump, policy, concepts_path, out):
    """Parse a dump, filter problems, write corpus JSONL files."""
    posts = corpus_mod.parse_dump(Path(dump))
    concepts = load_concepts(concepts_path or shipped_concepts_path())
    if policy == "default":
        pol = corpus_mod.default_policy(concepts)
    else:
        obj = json.loads(Path(policy).read_text(encoding="utf-8"))
        pol = corpus_mod.TagPolicy(
            excluded=set(obj.get("excluded", [])),
            ignored=set(obj.get("ignored", [])),
            allowed_concepts=set(obj.get("allowed_concepts") or [c.id for c in concepts]),
            max_tags=obj.get("max_tags", 3),
        )
    problems, answers, report = corpus_mod.filter_problems(posts, pol)
    save_corpus(Corpus(problems, answers), out)
    click.echo(json.dumps(report.__dict__))


@main.command()
@click.option("--corpus", "corpus_dir", required=True)
@click.option("--fractions", default=None, help="train,dev,test (defaults to the shipped ratios)")
@click.option("--seed", default=0, type=int)
@click.option("--out", default=None, help="output corpus dir (defaults to in-place)")
def split(corpus_dir, fractions, seed, out):
    """Assign deterministic train/dev/test splits."""
    corpus = load_corpus(corpus_dir)
    fr = (
        tuple(float(x) for x in fractions.split(","))
        if fractions
        else corpus_mod.DEFAULT_FRACTIONS
    )
    corpus_mod.assign_splits(corpus.problems, fr, seed)
    save_corpus(corpus, out or corpus_dir)
    counts = Counter(p.split for p in corpus.problems)
    click.echo(json.dumps(dict(counts)))


@main.command()
@click.option("--out", default=None, help="copy the shipped concept file here")
def concepts(out):
    """Validate (and optionally copy) the shipped concept list."""
    path = shipped_concepts_path()
    items = load_concepts(path)
    if out:
        shutil.copyfile(path, out)
    click.echo(f"{len(items)} concepts")


@main.command("embed-fake")
@click.option("--corpus", "corpus_dir", required=True)
@click.option("--concepts", "concepts_path", default=None)
@click.option("--dim", default=768, type=int)
@click.option("--seed", default=0, type=int)
@click.option("--out", required=True, help="output file prefix")
def embed_fake(corpus_dir, concepts_path, dim, seed, out):
    """Write deterministic synthetic embeddings for the corpus."""
    corpus = load_corpus(corpus_dir)
    cons = load_concepts(concepts_path or shipped_concepts_path())
    table = embed_store.fake_embeddings(corpus, seed, dim, cons)
    embed_store.write_table(table, out)
    click.echo(f"{len(table.items)} items, dim {dim}")


@main.command()
@click.option("--corpus", "corpus_dir", required=True)
@click.option("--annotations", "annotations_path", default=None)
@click.option("--out", default=None, help="CSV output path (default stdout)")
def stats(corpus_dir, annotations_path, out):
    """Emit sentences-per-problem and unknown-position histograms as CSV."""
    corpus = load_corpus(corpus_dir)
    sent_hist = Counter(len(p.sentences) for p in corpus.problems)
    lines = ["metric,value,count"]
    for n in sorted(sent_hist):
        lines.append(f"sentences_per_problem,{n},{sent_hist[n]}")
    if annotations_path:
        records = ann_io.load_annotations(annotations_path)
        pos_hist = Counter()
        for rec in records.values():
            if rec.unclear:
                continue
            for i, y in enumerate(rec.sentence_labels):
                if y == 1:
                    pos_hist[i] += 1
        for i in sorted(pos_hist):
            lines.append(f"unknown_position,{i},{pos_hist[i]}")
    csv = "\n".join(lines) + "\n"
    if out:
        Path(out).write_text(csv, encoding="utf-8")
    else:
        click.echo(csv, nl=False)


def _build_graph(corpus_dir, concepts_path, table_prefix):
    corpus = load_corpus(corpus_dir)
    cons = load_concepts(concepts_path or shipped_concepts_path())
    table = _read_table(table_prefix)
    return corpus, cons, table, problem_graph.build_graph(corpus, cons, table)


@main.command("graph-build")
@click.option("--corpus", "corpus_dir", required=True)
@click.option("--concepts", "concepts_path", default=None)
@click.option("--table", "table_prefix", required=True)
@click.option("--out", required=True)
def graph_build(corpus_dir, concepts_path, table_prefix, out):
    """Build the heterogeneous graph and export nodes/edges/stats."""
    _c, _k, _t, graph = _build_graph(corpus_dir, concepts_path, table_prefix)
    problem_graph.export_graph(graph, out)
    Path(out, "stats.csv").write_text(problem_graph.graph_stats_csv(graph),
                                      encoding="utf-8")
    click.echo(json.dumps(graph.counts()))


@main.command("graph-train")
@click.option("--corpus", "corpus_dir", required=True)
@click.option("--concepts", "concepts_path", default=None)
@click.option("--table", "table_prefix", required=True)
@click.option("--config", "config_path", default=None)
@click.option("--seed", default=0, type=int)
@click.option("--out", required=True, help="checkpoint prefix")
def graph_train(corpus_dir, concepts_path, table_prefix, config_path, seed, out):
    """Train GCN link prediction on problem-has-type edges."""
    corpus, _k, _t, graph = _build_graph(corpus_dir, concepts_path, table_prefix)
    cfg_dict = _load_config(config_path)
    cfg = problem_graph.GcnConfig(
        layers=cfg_dict.get("layers", 3),
        hidden=cfg_dict.get("hidden", 100),
        lr=cfg_dict.get("lr", 1e-3),
        epochs=cfg_dict.get("epochs", 200),
        seed=seed,
    )
    splits = {p.id: p.split for p in corpus.problems}
    model, info = problem_graph.train_link_prediction(graph, cfg, splits)
    model.save(out, {"log": info["log"]})
    click.echo(f"final loss {info['log'][-1]['loss']:.4f}")


@main.command("train-concept")
@click.option("--corpus", "corpus_dir", required=True)
@click.option("--table", "table_prefix", required=True)
@click.option("--config", "config_path", default=None)
@click.option("--seed", default=0, type=int)
@click.option("--out", required=True, help="checkpoint prefix")
def train_concept(corpus_dir, table_prefix, config_path, seed, out):
    """Train a multi-label concept classifier."""
    corpus = load_corpus(corpus_dir)
    table = _read_table(table_prefix)
    cfg_dict = _load_config(config_path)
    cfg_dict["seed"] = seed
    cfg = concept_models.ConceptModelConfig(
        **{k: v for k, v in cfg_dict.items()
           if k in concept_models.ConceptModelConfig.__dataclass_fields__}
    )
    model, info = concept_models.train_concept_classifier(corpus, table, cfg)
    model.save(out, {"loss_per_epoch": info["loss_per_epoch"]})
    click.echo(f"final loss {info['loss_per_epoch'][-1]:.4f}")


@main.command("train-proto")
@click.option("--corpus", "corpus_dir", required=True)
@click.option("--table", "table_prefix", required=True)
@click.option("--config", "config_path", default=None)
@click.option("--seed", default=0, type=int)
@click.option("--out", required=True, help="checkpoint prefix")
def train_proto(corpus_dir, table_prefix, config_path, seed, out):
    """Episodic prototypical-network training on single-concept problems."""
    corpus = load_corpus(corpus_dir)
    table = _read_table(table_prefix)
    cfg_dict = _load_config(config_path)
    ep = concept_models.EpisodeConfig(
        n_way=cfg_dict.get("n_way"),
        support=cfg_dict.get("support", 10),
        query=cfg_dict.get("query", 15),
        episodes=cfg_dict.get("episodes", 100),
    )
    mcfg = concept_models.ConceptModelConfig(
        encoder=cfg_dict.get("encoder", "cnn"),
        widths=cfg_dict.get("widths", [3, 4, 5, 6]),
        kernels_per_width=cfg_dict.get("kernels_per_width", 192),
        hidden=cfg_dict.get("hidden", 384),
        lr=cfg_dict.get("lr", 1e-3),
        seed=seed,
    )
    encoder, info = concept_models.train_prototypical(
        corpus, table, ep, mcfg, strict=cfg_dict.get("strict", False)
    )
    encoder.save(out, {"episode_losses": info["episode_losses"],
                       "classes": info["classes"]})
    click.echo(f"{len(info['episode_losses'])} episodes")


@main.command("export-prototypes")
@click.option("--corpus", "corpus_dir", required=True)
@click.option("--table", "table_prefix", required=True)
@click.option("--ckpt", required=True, help="prototype encoder checkpoint prefix")
@click.option("--concepts", "concepts_path", default=None)
@click.option("--trials", default=20, type=int)
@click.option("--support", default=10, type=int)
@click.option("--seed", default=0, type=int)
@click.option("--out", required=True, help="CSV output path")
def export_prototypes_cmd(corpus_dir, table_prefix, ckpt, concepts_path, trials,
                          support, seed, out):
    """2-D projection of prototypes and consistently-classified problems."""
    corpus = load_corpus(corpus_dir)
    table = _read_table(table_prefix)
    cons = load_concepts(concepts_path or shipped_concepts_path())
    encoder = concept_models.PrototypeEncoder.load(ckpt)
    rows = concept_models.export_prototypes(
        encoder, corpus, table, cons, trials, support=support, seed=seed
    )
    Path(out).write_text(concept_models.prototype_rows_to_csv(rows), encoding="utf-8")
    click.echo(f"{len(rows)} rows")


@main.command("train-unknown")
@click.option("--corpus", "corpus_dir", required=True)
@click.option("--table", "table_prefix", required=True)
@click.option("--annotations", "annotations_path", required=True)
@click.option("--config", "config_path", default=None)
@click.option("--gcn-ckpt", default=None, help="GCN checkpoint prefix (cnn+graph)")
@click.option("--concepts", "concepts_path", default=None)
@click.option("--seed", default=0, type=int)
@click.option("--out", required=True, help="checkpoint prefix")
def train_unknown(corpus_dir, table_prefix, annotations_path, config_path,
                  gcn_ckpt, concepts_path, seed, out):
    """Train the sentence-level unknown detector on train-split problems."""
    corpus = load_corpus(corpus_dir)
    table = _read_table(table_prefix)
    records = ann_io.load_annotations(annotations_path)
    cfg_dict = _load_config(config_path)
    cfg_dict["seed"] = seed
    cfg = unknown_extractor.UnknownModelConfig(
        **{k: v for k, v in cfg_dict.items()
           if k in unknown_extractor.UnknownModelConfig.__dataclass_fields__}
    )
    train_corpus = Corpus(corpus.split_problems("train"), corpus.answers)
    dataset = unknown_extractor.build_sentence_dataset(train_corpus, records)
    contexts = None
    if cfg.context_kind == "cnn+graph":
        if not gcn_ckpt:
            raise click.UsageError("--gcn-ckpt required for cnn+graph context")
        cons = load_concepts(concepts_path or shipped_concepts_path())
        graph = problem_graph.build_graph(corpus, cons, table)
        gcn = problem_graph.GcnModel.load(gcn_ckpt)
        contexts = problem_graph.all_problem_contexts(graph, gcn)
        cfg.graph_dim = gcn.cfg.hidden
    model, info = unknown_extractor.train_unknown_model(
        dataset, corpus, table, cfg, contexts
    )
    model.save(out, {"loss_per_epoch": info["loss_per_epoch"]})
    click.echo(f"final loss {info['loss_per_epoch'][-1]:.4f}")


def _unknown_predictions_from_model(model, corpus, table, split, contexts):
    preds = {}
    for p in corpus.split_problems(split):
        preds[p.id] = [
            1 if flagged else 0
            for _i, _p, flagged in unknown_extractor.extract_unknowns(
                model, p, table, contexts
            )
        ]
    return preds


@main.command()
@click.option("--task", type=click.Choice(["unknown"]), default="unknown")
@click.option("--method", type=click.Choice(["majority", "nth", "last"]),
              default="majority")
@click.option("--nth", default=1, type=int)
@click.option("--corpus", "corpus_dir", required=True)
@click.option("--annotations", "annotations_path", required=True)
@click.option("--split", "split_name", default="dev")
@click.option("--out", default=None, help="report JSON path")
def baseline(task, method, nth, corpus_dir, annotations_path, split_name, out):
    """Evaluate a non-learning baseline."""
    corpus = load_corpus(corpus_dir)
    records = ann_io.load_annotations(annotations_path)
    problems = corpus.split_problems(split_name)
    if method == "majority":
        preds = unknown_extractor.baseline_majority(problems)
    elif method == "nth":
        preds = unknown_extractor.baseline_nth(problems, nth)
    else:
        preds = unknown_extractor.baseline_last(problems)
    report = eval_metrics.evaluate_unknown_run(
        preds, corpus, records, split_name,
        config={"baseline": method, "nth": nth if method == "nth" else None},
    )
    if out:
        report.save(out)
    click.echo(report.to_json())


@main.command("eval")
@click.option("--task", type=click.Choice(["unknown", "concept"]), required=True)
@click.option("--ckpt", required=True, help="checkpoint prefix")
@click.option("--corpus", "corpus_dir", required=True)
@click.option("--table", "table_prefix", required=True)
@click.option("--annotations", "annotations_path", default=None)
@click.option("--gcn-ckpt", default=None)
@click.option("--concepts", "concepts_path", default=None)
@click.option("--split", "split_name", default="dev")
@click.option("--out", default=None, help="report JSON path")
def eval_cmd(task, ckpt, corpus_dir, table_prefix, annotations_path, gcn_ckpt,
             concepts_path, split_name, out):
    """Evaluate a trained checkpoint on a split."""
    corpus = load_corpus(corpus_dir)
    table = _read_table(table_prefix)
    if task == "concept":
        model = concept_models.ConceptModel.load(ckpt)
        report = eval_metrics.evaluate_concept_run(
            model, corpus, table, split_name, model.concept_ids,
            seed=model.cfg.seed, config=model.cfg.as_dict(),
        )
    else:
        if not annotations_path:
            raise click.UsageError("--annotations required for the unknown task")
        records = ann_io.load_annotations(annotations_path)
        model = unknown_extractor.UnknownModel.load(ckpt)
        contexts = None
        if model.cfg.context_kind == "cnn+graph":
            if not gcn_ckpt:
                raise click.UsageError("--gcn-ckpt required for cnn+graph context")
            cons = load_concepts(concepts_path or shipped_concepts_path())
            graph = problem_graph.build_graph(corpus, cons, table)
            gcn = problem_graph.GcnModel.load(gcn_ckpt)
            contexts = problem_graph.all_problem_contexts(graph, gcn)
        preds = _unknown_predictions_from_model(model, corpus, table, split_name,
                                                contexts)
        report = eval_metrics.evaluate_unknown_run(
            preds, corpus, records, split_name,
            seed=model.cfg.seed, config=model.cfg.as_dict(),
        )
    if out:
        report.save(out)
    click.echo(report.to_json())


@main.command()
@click.option("--corpus", "corpus_dir", required=True)
@click.option("--journal", required=True, help="annotation journal path")
@click.option("--port", default=8008, type=int)
def serve(corpus_dir, journal, port):
    """Run the annotation HTTP service."""
    from .service import serve_annotation

    corpus = load_corpus(corpus_dir)
    serve_annotation(port, corpus, AnnotationStore(journal))


@main.command("export-annotations")
@click.option("--journal", required=True)
@click.option("--out", default=None, help="output JSONL (default stdout)")
def export_annotations_cmd(journal, out):
    """Export the annotation store as stable JSONL."""
    store = AnnotationStore(journal)
    text = ann_io.export_annotations(store.records)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


if __name__ == "__main__":
    sys.exit(main())
