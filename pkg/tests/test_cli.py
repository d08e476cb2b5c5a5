import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from punk.annotations import export_annotations
from punk.cli import main
from punk.corpus import Answer, Corpus, save_corpus
from punk.unknown_extractor import AnnotationRecord, labels_from_spans

from conftest import make_problem

XML_DUMP = """<?xml version="1.0" encoding="utf-8"?>
<posts>
  <row Id="1" PostTypeId="1" AcceptedAnswerId="3" Body="&lt;p&gt;A coin is tossed twice. What is the variance of the count?&lt;/p&gt;" Tags="&lt;variance&gt;&lt;self-study&gt;" />
  <row Id="2" PostTypeId="1" AcceptedAnswerId="4" Body="&lt;p&gt;Rolling a die. Find the expected value.&lt;/p&gt;" Tags="&lt;expected-value&gt;" />
  <row Id="3" PostTypeId="2" ParentId="1" Body="&lt;p&gt;Half times two.&lt;/p&gt;" />
  <row Id="4" PostTypeId="2" ParentId="2" Body="&lt;p&gt;It is 3.5.&lt;/p&gt;" />
  <row Id="5" PostTypeId="1" AcceptedAnswerId="3" Body="&lt;p&gt;How do I do this in R?&lt;/p&gt;" Tags="&lt;r&gt;&lt;variance&gt;" />
</posts>
"""

CONCEPT_ROWS = [
    {"id": "variance", "name": "Variance", "chapter": 3, "section": 3, "order": 53},
    {"id": "expected-value", "name": "Expected Value", "chapter": 3, "section": 1,
     "order": 49},
    {"id": "poisson-distribution", "name": "The Poisson Distribution", "chapter": 2,
     "section": 3, "order": 29},
]


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def workdir(tmp_path):
    (tmp_path / "dump.xml").write_text(XML_DUMP, encoding="utf-8")
    (tmp_path / "concepts.jsonl").write_text(
        "".join(json.dumps(r) + "\n" for r in CONCEPT_ROWS), encoding="utf-8"
    )
    return tmp_path


def corpus_on_disk(tmp_path, proto=False):
    """Save a small corpus to disk; optionally padded for episodic training."""
    if proto:
        problems = []
        for tag, tpl in (("variance", "What is the variance of draw {i} here?"),
                         ("expected-value", "Compute the expected value of case {i}.")):
            for i in range(5):
                split = "train" if i < 4 else "dev"
                problems.append(make_problem(f"{tag}-{i}", tpl.format(i=i), [tag],
                                             split=split))
    else:
        problems = [
            make_problem("p1", "A coin is tossed. What is the variance?",
                         ["variance"]),
            make_problem("p2", "A die is rolled. Find the expected value.",
                         ["expected-value"]),
            make_problem("p3", "Calls arrive hourly. What is the rate?",
                         ["poisson-distribution"], split="dev"),
        ]
    answers = [Answer(p.answer_id, p.id, "Answer body.") for p in problems]
    out = tmp_path / "corpus"
    save_corpus(Corpus(problems, answers), out)
    return out


def annotations_on_disk(tmp_path, corpus_dir):
    from punk.corpus import load_corpus

    corpus = load_corpus(corpus_dir)
    records = {}
    for p in corpus.problems:
        s = p.sentences[-1]
        spans = [(s.index, s.char_span[0], s.char_span[1], s.text)]
        records[p.id] = AnnotationRecord(p.id, spans, labels_from_spans(p, spans))
    path = tmp_path / "annotations.jsonl"
    path.write_text(export_annotations(records), encoding="utf-8")
    return path


def embed(runner, tmp_path, corpus_dir, dim=8):
    prefix = tmp_path / "emb"
    res = runner.invoke(main, [
        "embed-fake", "--corpus", str(corpus_dir),
        "--concepts", str(tmp_path / "concepts.jsonl"),
        "--dim", str(dim), "--seed", "0", "--out", str(prefix),
    ])
    assert res.exit_code == 0, res.output
    return prefix


class TestIngestAndSplit:
    def test_ingest_filters_and_reports(self, runner, workdir):
        out = workdir / "corpus"
        res = runner.invoke(main, [
            "ingest", "--dump", str(workdir / "dump.xml"),
            "--concepts", str(workdir / "concepts.jsonl"),
            "--out", str(out),
        ])
        assert res.exit_code == 0, res.output
        report = json.loads(res.output)
        assert report["kept"] == 2
        assert report["dropped_excluded"] == 1
        lines = (out / "problems.jsonl").read_text().splitlines()
        assert len(lines) == 2
        # the ignored tag was removed
        assert json.loads(lines[0])["concept_tags"] == ["variance"]

    def test_split_counts_and_determinism(self, runner, workdir):
        corpus_dir = corpus_on_disk(workdir, proto=True)
        args = ["split", "--corpus", str(corpus_dir),
                "--fractions", "0.6,0.2,0.2", "--seed", "4"]
        r1 = runner.invoke(main, args)
        assert r1.exit_code == 0, r1.output
        first = (corpus_dir / "problems.jsonl").read_text()
        r2 = runner.invoke(main, args)
        assert (corpus_dir / "problems.jsonl").read_text() == first
        counts = json.loads(r1.output)
        assert sum(counts.values()) == 10
        assert counts["train"] == 6

    def test_concepts_command(self, runner):
        res = runner.invoke(main, ["concepts"])
        assert res.exit_code == 0
        assert res.output.strip() == "69 concepts"


class TestStatsAndEmbed:
    def test_embed_fake_round_trip(self, runner, workdir):
        corpus_dir = corpus_on_disk(workdir)
        prefix = embed(runner, workdir, corpus_dir)
        from punk.embed_store import read_table

        table = read_table(prefix)
        assert table.dim == 8

    def test_stats_csv(self, runner, workdir):
        corpus_dir = corpus_on_disk(workdir)
        ann = annotations_on_disk(workdir, corpus_dir)
        res = runner.invoke(main, [
            "stats", "--corpus", str(corpus_dir), "--annotations", str(ann),
        ])
        assert res.exit_code == 0, res.output
        assert res.output.startswith("metric,value,count\n")
        assert "sentences_per_problem,2,3" in res.output
        assert "unknown_position,1,3" in res.output


class TestGraphCommands:
    def test_build_and_train(self, runner, workdir):
        corpus_dir = corpus_on_disk(workdir)
        prefix = embed(runner, workdir, corpus_dir)
        gdir = workdir / "graph"
        res = runner.invoke(main, [
            "graph-build", "--corpus", str(corpus_dir),
            "--concepts", str(workdir / "concepts.jsonl"),
            "--table", str(prefix), "--out", str(gdir),
        ])
        assert res.exit_code == 0, res.output
        counts = json.loads(res.output)
        assert counts["nodes"] == {"concept": 3, "problem": 3, "answer": 3}
        assert (gdir / "nodes.jsonl").exists()
        assert (gdir / "stats.csv").read_text().startswith("kind,count")

        cfg = workdir / "gcn.json"
        cfg.write_text(json.dumps({"layers": 1, "hidden": 4, "epochs": 2}))
        res = runner.invoke(main, [
            "graph-train", "--corpus", str(corpus_dir),
            "--concepts", str(workdir / "concepts.jsonl"),
            "--table", str(prefix), "--config", str(cfg),
            "--seed", "0", "--out", str(workdir / "gcn"),
        ])
        assert res.exit_code == 0, res.output
        assert (workdir / "gcn.json").exists()
        assert (workdir / "gcn.bin").exists()


class TestTrainingCommands:
    def test_concept_train_eval_and_determinism(self, runner, workdir):
        corpus_dir = corpus_on_disk(workdir)
        prefix = embed(runner, workdir, corpus_dir)
        cfg = workdir / "c.json"
        cfg.write_text(json.dumps({"encoder": "maxent", "epochs": 3}))

        def train(out):
            res = runner.invoke(main, [
                "train-concept", "--corpus", str(corpus_dir),
                "--table", str(prefix), "--config", str(cfg),
                "--seed", "1", "--out", str(out),
            ])
            assert res.exit_code == 0, res.output

        train(workdir / "c1")
        train(workdir / "c2")
        # bit-identical checkpoints for the same seed
        assert (workdir / "c1.bin").read_bytes() == (workdir / "c2.bin").read_bytes()
        assert (workdir / "c1.json").read_bytes() == (workdir / "c2.json").read_bytes()

        res = runner.invoke(main, [
            "eval", "--task", "concept", "--ckpt", str(workdir / "c1"),
            "--corpus", str(corpus_dir), "--table", str(prefix),
            "--split", "dev", "--out", str(workdir / "report.json"),
        ])
        assert res.exit_code == 0, res.output
        report = json.loads((workdir / "report.json").read_text())
        assert report["task"] == "concept"
        assert 0.0 <= report["macro_f1"] <= 1.0

    def test_unknown_train_eval_baseline(self, runner, workdir):
        corpus_dir = corpus_on_disk(workdir)
        prefix = embed(runner, workdir, corpus_dir)
        ann = annotations_on_disk(workdir, corpus_dir)
        cfg = workdir / "u.json"
        cfg.write_text(json.dumps({"context_kind": "none", "sentence_kind": "bow",
                                   "dropout": 0.0, "epochs": 3}))
        res = runner.invoke(main, [
            "train-unknown", "--corpus", str(corpus_dir), "--table", str(prefix),
            "--annotations", str(ann), "--config", str(cfg),
            "--seed", "0", "--out", str(workdir / "unk"),
        ])
        assert res.exit_code == 0, res.output

        res = runner.invoke(main, [
            "eval", "--task", "unknown", "--ckpt", str(workdir / "unk"),
            "--corpus", str(corpus_dir), "--table", str(prefix),
            "--annotations", str(ann), "--split", "dev",
        ])
        assert res.exit_code == 0, res.output
        assert json.loads(res.output)["task"] == "unknown"

        res = runner.invoke(main, [
            "baseline", "--method", "last", "--corpus", str(corpus_dir),
            "--annotations", str(ann), "--split", "dev",
        ])
        assert res.exit_code == 0, res.output
        # gold unknowns are all last sentences, so the baseline is perfect
        assert json.loads(res.output)["macro_f1"] == pytest.approx(1.0)

    def test_unknown_eval_requires_annotations(self, runner, workdir):
        corpus_dir = corpus_on_disk(workdir)
        prefix = embed(runner, workdir, corpus_dir)
        res = runner.invoke(main, [
            "eval", "--task", "unknown", "--ckpt", str(workdir / "nope"),
            "--corpus", str(corpus_dir), "--table", str(prefix),
        ])
        assert res.exit_code != 0
        assert "--annotations" in res.output

    def test_proto_train_and_export(self, runner, workdir):
        corpus_dir = corpus_on_disk(workdir, proto=True)
        prefix = embed(runner, workdir, corpus_dir)
        cfg = workdir / "p.json"
        cfg.write_text(json.dumps({"support": 2, "query": 2, "episodes": 2,
                                   "widths": [1], "kernels_per_width": 4}))
        res = runner.invoke(main, [
            "train-proto", "--corpus", str(corpus_dir), "--table", str(prefix),
            "--config", str(cfg), "--seed", "0", "--out", str(workdir / "proto"),
        ])
        assert res.exit_code == 0, res.output

        res = runner.invoke(main, [
            "export-prototypes", "--corpus", str(corpus_dir),
            "--table", str(prefix), "--ckpt", str(workdir / "proto"),
            "--concepts", str(workdir / "concepts.jsonl"),
            "--trials", "20", "--support", "2", "--seed", "0",
            "--out", str(workdir / "protos.csv"),
        ])
        assert res.exit_code == 0, res.output
        csv = (workdir / "protos.csv").read_text()
        assert csv.startswith("kind,concept_id,x,y,problem_id\n")
        assert "prototype,variance," in csv


class TestExportAnnotations:
    def test_journal_export(self, runner, workdir, toy_corpus):
        from punk.annotations import AnnotationStore

        journal = workdir / "journal.jsonl"
        store = AnnotationStore(journal)
        p = toy_corpus.problems[0]
        store.put(p, [], True, 0)
        res = runner.invoke(main, ["export-annotations", "--journal", str(journal)])
        assert res.exit_code == 0
        assert json.loads(res.output)["unclear"] is True
