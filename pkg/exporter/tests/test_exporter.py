import json
from pathlib import Path

import numpy as np
import pytest

from punkembed_export.encoders import HashedEncoder, make_encoder
from punkembed_export.export import export_embeddings


def write_fixture(tmp_path):
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    problems = [
        {
            "id": "p1",
            "text": "A coin is tossed. What is the variance?",
            "sentences": [
                {"index": 0, "text": "A coin is tossed.", "char_span": [0, 17]},
                {"index": 1, "text": "What is the variance?", "char_span": [18, 39]},
            ],
            "concept_tags": ["variance"],
            "answer_id": "a1",
            "split": "train",
        },
        {
            "id": "p2",
            "text": "A die is rolled. Find the expected value.",
            "sentences": [
                {"index": 0, "text": "A die is rolled.", "char_span": [0, 16]},
                {"index": 1, "text": "Find the expected value.", "char_span": [17, 41]},
            ],
            "concept_tags": ["expected-value"],
            "answer_id": "a2",
            "split": "train",
        },
    ]
    answers = [
        {"id": "a1", "problem_id": "p1", "text": "Use npq for the count."},
        {"id": "a2", "problem_id": "p2", "text": "It equals 3.5 exactly."},
    ]
    (corpus / "problems.jsonl").write_text(
        "".join(json.dumps(r) + "\n" for r in problems)
    )
    (corpus / "answers.jsonl").write_text(
        "".join(json.dumps(r) + "\n" for r in answers)
    )
    concepts = tmp_path / "concepts.jsonl"
    concepts.write_text(
        json.dumps({"id": "variance", "name": "Variance", "chapter": 3,
                    "section": 3, "order": 53,
                    "definitions": ["The expected squared deviation."]}) + "\n"
        + json.dumps({"id": "expected-value", "name": "Expected Value",
                      "chapter": 3, "section": 1, "order": 49}) + "\n"
    )
    return corpus, concepts


def test_emitted_files_pass_reference_validation(tmp_path):
    corpus, concepts = write_fixture(tmp_path)
    manifest = export_embeddings(corpus, HashedEncoder(dim=768, seed=0),
                                 tmp_path / "emb", concepts)
    assert manifest["dim"] == 768

    # the reference reader from the primary package validates magic, dim,
    # offsets, and duplicates
    from punk.embed_store import ItemKey, read_table

    table = read_table(tmp_path / "emb")
    assert table.dim == 768
    expected_keys = {
        ItemKey("problem", "p1"), ItemKey("problem", "p2"),
        ItemKey("sentence", "p1", 0), ItemKey("sentence", "p1", 1),
        ItemKey("sentence", "p2", 0), ItemKey("sentence", "p2", 1),
        ItemKey("answer", "a1"), ItemKey("answer", "a2"),
        ItemKey("concept", "variance"), ItemKey("concept", "expected-value"),
    }
    assert set(table.items) == expected_keys
    # a problem has one row per whitespace token
    assert table.tokens(ItemKey("problem", "p1")).shape == (8, 768)
    assert np.all(np.isfinite(table.pooled(ItemKey("answer", "a1"))))


def test_rerun_is_bit_identical(tmp_path):
    corpus, concepts = write_fixture(tmp_path)
    export_embeddings(corpus, HashedEncoder(768, 0), tmp_path / "one", concepts)
    export_embeddings(corpus, HashedEncoder(768, 0), tmp_path / "two", concepts)
    assert (tmp_path / "one.bin").read_bytes() == (tmp_path / "two.bin").read_bytes()
    assert (tmp_path / "one.json").read_bytes() == (tmp_path / "two.json").read_bytes()
    assert (tmp_path / "one.manifest.json").read_bytes() == \
        (tmp_path / "two.manifest.json").read_bytes()


def test_manifest_matches_header_and_fingerprint(tmp_path):
    corpus, concepts = write_fixture(tmp_path)
    manifest = export_embeddings(corpus, HashedEncoder(768, 1),
                                 tmp_path / "emb", concepts)
    import struct

    raw = (tmp_path / "emb.bin").read_bytes()
    assert raw[:8] == b"PUNKEMB1"
    assert struct.unpack("<I", raw[8:12])[0] == manifest["dim"]
    assert len(manifest["corpus_fingerprint"]) == 64
    on_disk = json.loads((tmp_path / "emb.manifest.json").read_text())
    assert on_disk == manifest


def test_dim_mismatch_rejected(tmp_path):
    corpus, concepts = write_fixture(tmp_path)
    with pytest.raises(ValueError, match="expected 768"):
        export_embeddings(corpus, HashedEncoder(dim=64, seed=0),
                          tmp_path / "emb", concepts)


def test_empty_item_names_the_item(tmp_path):
    corpus, concepts = write_fixture(tmp_path)
    rows = (corpus / "answers.jsonl").read_text().splitlines()
    obj = json.loads(rows[0])
    obj["text"] = "   "
    (corpus / "answers.jsonl").write_text(
        json.dumps(obj) + "\n" + rows[1] + "\n"
    )
    with pytest.raises(ValueError, match=r"answer.*a1"):
        export_embeddings(corpus, HashedEncoder(768, 0), tmp_path / "emb",
                          concepts)


def test_hashed_encoder_properties():
    enc = HashedEncoder(dim=16, seed=3)
    m = enc.encode("Variance of the variance")
    assert m.shape == (4, 16)
    # identical token strings share a row, case-insensitively
    assert np.array_equal(m[0], m[3])
    assert np.all(np.abs(m) <= 1.0)
    with pytest.raises(ValueError, match="empty"):
        enc.encode("   ")


def test_make_encoder_spec():
    enc = make_encoder("hashed", 32, 7)
    assert enc.dim == 32 and enc.seed == 7
    with pytest.raises(ValueError, match="unknown encoder"):
        make_encoder("word2vec", 32, 0)


def test_cli_end_to_end(tmp_path):
    from click.testing import CliRunner

    from punkembed_export.cli import main

    corpus, concepts = write_fixture(tmp_path)
    res = CliRunner().invoke(main, [
        "--corpus", str(corpus), "--concepts", str(concepts),
        "--encoder", "hashed", "--dim", "768", "--seed", "0",
        "--out", str(tmp_path / "emb"),
    ])
    assert res.exit_code == 0, res.output
    assert "10 items, dim 768" in res.output
    assert Path(tmp_path / "emb.manifest.json").exists()
