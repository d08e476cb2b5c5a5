import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from punk.corpus import (
    Corpus,
    DumpParseError,
    TagPolicy,
    assign_splits,
    default_policy,
    filter_problems,
    load_concepts,
    load_corpus,
    parse_dump,
    save_corpus,
    segment_sentences,
    shipped_concepts_path,
    strip_markup,
)

XML_FIXTURE = """<?xml version="1.0" encoding="utf-8"?>
<posts>
  <row Id="1" PostTypeId="1" AcceptedAnswerId="3" Body="&lt;p&gt;What is the variance of X?&lt;/p&gt;" Tags="&lt;variance&gt;" />
  <row Id="2" PostTypeId="1" AcceptedAnswerId="4" Body="&lt;p&gt;Expected value of a die?&lt;/p&gt;" Tags="&lt;expected-value&gt;" />
  <row Id="3" PostTypeId="2" ParentId="1" Body="&lt;p&gt;Use the definition.&lt;/p&gt;" />
  <row Id="4" PostTypeId="2" ParentId="2" Body="&lt;p&gt;It is 3.5.&lt;/p&gt;" />
</posts>
"""


class TestParseDump:
    def test_answer_field_mapping(self):
        posts = parse_dump(XML_FIXTURE)
        answer = next(p for p in posts if p.post_id == "3")
        assert answer.post_type == "answer"
        assert answer.parent_id == "1"

    def test_file_order_and_count(self):
        posts = parse_dump(XML_FIXTURE)
        assert [p.post_id for p in posts] == ["1", "2", "3", "4"]
        assert sum(p.post_type == "question" for p in posts) == 2

    def test_missing_id_names_line(self):
        bad = '<posts>\n<row PostTypeId="1" Body="x" />\n</posts>'
        with pytest.raises(DumpParseError, match="missing Id at line 2"):
            parse_dump(bad)

    def test_duplicate_id(self):
        bad = '<posts><row Id="1" PostTypeId="1" Body="x" /><row Id="1" PostTypeId="2" Body="y" /></posts>'
        with pytest.raises(DumpParseError, match="duplicate Id 1"):
            parse_dump(bad)

    def test_malformed_xml_names_line(self):
        with pytest.raises(DumpParseError, match="line"):
            parse_dump("<posts>\n<row Id=1 ></posts>")

    def test_jsonl_mirror(self):
        lines = [
            json.dumps({"id": "q1", "type": "question", "body": "What is X?",
                        "tags": ["variance"], "accepted_answer_id": "a1"}),
            json.dumps({"id": "a1", "type": "answer", "body": "X is Y.",
                        "parent_id": "q1"}),
        ]
        posts = parse_dump("\n".join(lines))
        assert posts[0].tags == ["variance"]
        assert posts[1].parent_id == "q1"

    def test_tag_bracket_parsing(self):
        posts = parse_dump(XML_FIXTURE.replace("&lt;variance&gt;",
                                               "&lt;variance&gt;&lt;self-study&gt;"))
        assert posts[0].tags == ["variance", "self-study"]


def make_posts():
    return parse_dump(XML_FIXTURE)


class TestFilterProblems:
    def policy(self):
        return TagPolicy(
            excluded={"matlab", "r"},
            ignored={"probability", "self-study"},
            allowed_concepts={"variance", "expected-value", "correlation",
                              "normal", "poisson-distribution"},
            max_tags=3,
        )

    def q(self, pid, tags, accepted="a", body="Some question. What is it?"):
        from punk.corpus import RawPost

        return RawPost(pid, "question", body, tags, accepted_answer_id=accepted)

    def a(self, pid, parent):
        from punk.corpus import RawPost

        return RawPost(pid, "answer", "An answer.", parent_id=parent)

    def test_excluded_tag_drops(self):
        posts = [self.q("1", ["r", "correlation"], "a"), self.a("a", "1")]
        problems, _answers, report = filter_problems(posts, self.policy())
        assert problems == []
        assert report.dropped_excluded == 1

    def test_ignored_only_drops(self):
        posts = [self.q("1", ["probability"], "a"), self.a("a", "1")]
        problems, _answers, report = filter_problems(posts, self.policy())
        assert problems == []
        assert report.dropped_no_concept_tags == 1

    def test_four_surviving_tags_drops(self):
        posts = [
            self.q("1", ["variance", "expected-value", "correlation", "normal",
                         "poisson-distribution"], "a"),
            self.a("a", "1"),
        ]
        problems, _answers, report = filter_problems(posts, self.policy())
        assert problems == []
        assert report.dropped_too_many_tags == 1

    def test_kept_with_ignored_tag_removed(self):
        posts = [self.q("1", ["probability", "variance"], "a"), self.a("a", "1")]
        problems, answers, _report = filter_problems(posts, self.policy())
        assert len(problems) == 1
        assert problems[0].concept_tags == {"variance"}
        assert answers[0].problem_id == "1"

    def test_dangling_accepted_answer_counted_not_fatal(self):
        posts = [self.q("1", ["variance"], "missing")]
        problems, _answers, report = filter_problems(posts, self.policy())
        assert problems == []
        assert report.dropped_dangling_answer == 1

    def test_no_accepted_answer_drops(self):
        posts = [self.q("1", ["variance"], accepted=None)]
        problems, _answers, report = filter_problems(posts, self.policy())
        assert problems == []
        assert report.dropped_no_accepted_answer == 1

    def test_order_independence(self):
        posts = [
            self.q("1", ["variance"], "a1"),
            self.q("2", ["r", "variance"], "a2"),
            self.q("3", ["expected-value", "probability"], "a3"),
            self.a("a1", "1"),
            self.a("a2", "2"),
            self.a("a3", "3"),
        ]
        ids1 = {p.id for p in filter_problems(posts, self.policy())[0]}
        ids2 = {p.id for p in filter_problems(posts[::-1], self.policy())[0]}
        assert ids1 == ids2 == {"1", "3"}

    def test_tag_case_insensitive(self):
        posts = [self.q("1", ["Variance "], "a"), self.a("a", "1")]
        problems, _a, _r = filter_problems(posts, self.policy())
        assert problems[0].concept_tags == {"variance"}

    def test_policy_invariants(self):
        with pytest.raises(ValueError, match="overlap"):
            TagPolicy(excluded={"x"}, ignored={"x"}, allowed_concepts=set())
        with pytest.raises(ValueError, match="max_tags"):
            TagPolicy(excluded=set(), ignored=set(), allowed_concepts=set(),
                      max_tags=0)


class TestStripMarkup:
    def test_code_becomes_token(self):
        out = strip_markup("<p>Try <code>rnorm(10)</code> first.</p>")
        assert "<code>" in out
        assert "rnorm" not in out

    def test_math_preserved(self):
        out = strip_markup("<p>Compute $P(A \\mid B)$ now.</p>")
        assert "$P(A \\mid B)$" in out


class TestSegmentSentences:
    def test_two_terminators(self):
        sents = segment_sentences("What is X? I tried Y.")
        assert [s.text for s in sents] == ["What is X?", "I tried Y."]

    def test_no_split_in_decimal(self):
        sents = segment_sentences("Let p = 0.5. Then compute E[X].")
        assert [s.text for s in sents] == ["Let p = 0.5.", "Then compute E[X]."]

    def test_math_span_single_sentence(self):
        sents = segment_sentences("Compute $P(A \\mid B)$")
        assert len(sents) == 1

    def test_no_split_inside_math(self):
        sents = segment_sentences("We know $X. Y$ holds and more text")
        assert len(sents) == 1

    def test_single_letter_abbreviation(self):
        sents = segment_sentences("Let A. B be the event. Then stop.")
        assert len(sents) == 2

    def test_empty_text_error(self):
        with pytest.raises(ValueError):
            segment_sentences("   ")

    def test_spans_cover_and_are_ordered(self):
        text = "First thing here. Second part? Third bit!"
        sents = segment_sentences(text)
        prev_end = 0
        for s in sents:
            assert s.char_span[0] >= prev_end
            assert text[s.char_span[0]:s.char_span[1]] == s.text
            prev_end = s.char_span[1]

    @given(st.lists(st.sampled_from([
        "What is the variance here?",
        "Let p = 0.25 be fixed.",
        "Compute $E[X^2]$ for me.",
        "I tried everything!",
    ]), min_size=1, max_size=5))
    @settings(max_examples=30, deadline=None)
    def test_reassembly_whitespace_normalized(self, parts):
        text = " ".join(parts)
        sents = segment_sentences(text)
        rebuilt = " ".join(s.text for s in sents)
        assert " ".join(rebuilt.split()) == " ".join(text.split())


class TestAssignSplits:
    def _problems(self, n):
        from conftest import make_problem

        return [make_problem(f"p{i:05d}", "One sentence here.", ["variance"])
                for i in range(n)]

    def test_reference_split_sizes(self):
        problems = self._problems(1171)
        assign_splits(problems, seed=0)
        from collections import Counter

        counts = Counter(p.split for p in problems)
        assert (counts["train"], counts["dev"], counts["test"]) == (904, 110, 157)

    def test_deterministic(self):
        p1 = self._problems(50)
        p2 = self._problems(50)
        a1 = assign_splits(p1, (0.6, 0.2, 0.2), seed=9)
        a2 = assign_splits(p2, (0.6, 0.2, 0.2), seed=9)
        assert a1 == a2

    def test_all_train_degenerate(self):
        problems = self._problems(7)
        assign_splits(problems, (1.0, 0.0, 0.0), seed=1)
        assert all(p.split == "train" for p in problems)

    def test_partition(self):
        problems = self._problems(33)
        assignment = assign_splits(problems, (0.5, 0.25, 0.25), seed=2)
        assert set(assignment) == {p.id for p in problems}

    def test_empty_error(self):
        with pytest.raises(ValueError):
            assign_splits([], (1, 0, 0), 0)

    def test_bad_fractions(self):
        with pytest.raises(ValueError, match="sum to 1"):
            assign_splits(self._problems(3), (0.5, 0.2, 0.2), 0)


class TestConcepts:
    def test_shipped_file_has_69(self):
        concepts = load_concepts(shipped_concepts_path())
        assert len(concepts) == 69

    def test_gaussian_and_normal_distinct(self):
        concepts = {c.name: c for c in load_concepts(shipped_concepts_path())}
        assert "Gaussian" in concepts and "Normal" in concepts
        assert concepts["Gaussian"].order_index == 34
        assert concepts["Normal"].order_index == 35

    def test_order_respects_file_order(self):
        concepts = load_concepts(shipped_concepts_path())
        assert [c.order_index for c in concepts] == sorted(
            c.order_index for c in concepts
        )

    def test_chapters_and_sections_positive(self):
        for c in load_concepts(shipped_concepts_path()):
            assert c.chapter >= 1 and c.section >= 1

    def test_empty_file_error(self, tmp_path):
        f = tmp_path / "empty.jsonl"
        f.write_text("")
        with pytest.raises(ValueError, match="no concepts"):
            load_concepts(f)

    def test_duplicate_names_error(self, tmp_path):
        row = {"id": "x", "name": "X", "chapter": 1, "section": 1, "order": 1}
        f = tmp_path / "dup.jsonl"
        f.write_text(json.dumps(row) + "\n" + json.dumps({**row, "order": 2}) + "\n")
        with pytest.raises(ValueError, match="duplicate"):
            load_concepts(f)


class TestCorpusIO:
    def test_round_trip(self, toy_corpus, tmp_path):
        save_corpus(toy_corpus, tmp_path / "c")
        loaded = load_corpus(tmp_path / "c")
        assert [p.id for p in loaded.problems] == [p.id for p in toy_corpus.problems]
        assert loaded.problems[0].concept_tags == toy_corpus.problems[0].concept_tags
        assert loaded.problems[2].split == "dev"
        assert [a.id for a in loaded.answers] == [a.id for a in toy_corpus.answers]
