"""Corpus construction: dump parsing, filtering, segmentation, and splits."""

from __future__ import annotations

import json
import re
import xml.parsers.expat
from dataclasses import dataclass, field
from html import unescape
from html.parser import HTMLParser
from pathlib import Path

import numpy as np


class DumpParseError(ValueError):
    pass


@dataclass
class RawPost:
    post_id: str
    post_type: str  # question | answer
    body: str
    tags: list[str] = field(default_factory=list)
    accepted_answer_id: str | None = None
    parent_id: str | None = None


@dataclass
class Sentence:
    index: int
    text: str
    char_span: tuple[int, int]


@dataclass
class Problem:
    id: str
    text: str
    sentences: list[Sentence]
    concept_tags: set[str]
    answer_id: str
    split: str = "train"


@dataclass
class Answer:
    id: str
    problem_id: str
    text: str


@dataclass
class Concept:
    id: str
    name: str
    chapter: int
    section: int
    order_index: int
    definitions: list[str] = field(default_factory=list)
    examples: list[str] = field(default_factory=list)


@dataclass
class TagPolicy:
    excluded: set[str]
    ignored: set[str]
    allowed_concepts: set[str]
    max_tags: int = 3

    def __post_init__(self):
        self.excluded = {t.strip().lower() for t in self.excluded}
        self.ignored = {t.strip().lower() for t in self.ignored}
        self.allowed_concepts = {t.strip().lower() for t in self.allowed_concepts}
        if self.excluded & self.ignored:
            raise ValueError("excluded and ignored tag sets overlap")
        if self.max_tags < 1:
            raise ValueError("max_tags must be >= 1")


DEFAULT_EXCLUDED = {"matlab", "r"}
DEFAULT_IGNORED = {
    "probability",
    "mathematical-statistics",
    "meta-analysis",
    "hypothesis-testing",
    "distributions",
    "self-study",
    "intuition",
    "definition",
}


@dataclass
class Corpus:
    problems: list[Problem]
    answers: list[Answer]

    def problem_by_id(self) -> dict[str, Problem]:
        return {p.id: p for p in self.problems}

    def answer_by_id(self) -> dict[str, Answer]:
        return {a.id: a for a in self.answers}

    def split_problems(self, split: str) -> list[Problem]:
        return [p for p in self.problems if p.split == split]


# ---------------------------------------------------------------------------
# dump parsing

_TAG_RE = re.compile(r"<([^<>]+)>")


def _parse_tags(raw: str | None) -> list[str]:
    if not raw:
        return []
    found = _TAG_RE.findall(raw)
    if found:
        return found
    # JSONL mirrors may already carry a list; pipe/comma fallbacks are not
    # supported on purpose
    return []


def _post_from_attrs(attrs: dict, line: int) -> RawPost | None:
    post_id = attrs.get("Id")
    if post_id is None:
        raise DumpParseError(f"missing Id at line {line}")
    post_type = attrs.get("PostTypeId")
    if post_type == "1":
        return RawPost(
            post_id=str(post_id),
            post_type="question",
            body=attrs.get("Body", ""),
            tags=_parse_tags(attrs.get("Tags")),
            accepted_answer_id=attrs.get("AcceptedAnswerId"),
        )
    if post_type == "2":
        return RawPost(
            post_id=str(post_id),
            post_type="answer",
            body=attrs.get("Body", ""),
            parent_id=attrs.get("ParentId"),
        )
    return None  # wiki/moderation rows are dropped


def _parse_dump_xml(text: str) -> list[RawPost]:
    posts: list[RawPost] = []
    parser = xml.parsers.expat.ParserCreate()

    def start(name, attrs):
        if name != "row":
            return
        post = _post_from_attrs(attrs, parser.CurrentLineNumber)
        if post is not None:
            posts.append(post)

    parser.StartElementHandler = start
    try:
        parser.Parse(text, True)
    except xml.parsers.expat.ExpatError as exc:
        raise DumpParseError(
            f"malformed row at line {exc.lineno}: {xml.parsers.expat.errors.messages[exc.code]}"
        ) from exc
    return posts


def _parse_dump_jsonl(text: str) -> list[RawPost]:
    posts: list[RawPost] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DumpParseError(f"malformed row at line {lineno}: {exc.msg}") from exc
        if obj.get("id") is None:
            raise DumpParseError(f"missing Id at line {lineno}")
        kind = obj.get("type")
        if kind == "question":
            posts.append(
                RawPost(
                    post_id=str(obj["id"]),
                    post_type="question",
                    body=obj.get("body", ""),
                    tags=list(obj.get("tags") or []),
                    accepted_answer_id=(
                        str(obj["accepted_answer_id"])
                        if obj.get("accepted_answer_id") is not None
                        else None
                    ),
                )
            )
        elif kind == "answer":
            posts.append(
                RawPost(
                    post_id=str(obj["id"]),
                    post_type="answer",
                    body=obj.get("body", ""),
                    parent_id=(
                        str(obj["parent_id"]) if obj.get("parent_id") is not None else None
                    ),
                )
            )
    return posts


def parse_dump(source: str | Path) -> list[RawPost]:
    """Parse an XML rows dump or its JSONL mirror into RawPosts.

    Accepts a path or the raw file contents. Rows other than questions and
    answers are dropped. Duplicate post ids are an error.
    """
    if isinstance(source, Path) or (
        "\n" not in str(source) and Path(str(source)).exists()
    ):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = str(source)
    stripped = text.lstrip()
    if stripped.startswith("<"):
        posts = _parse_dump_xml(text)
    else:
        posts = _parse_dump_jsonl(text)
    seen: set[str] = set()
    for p in posts:
        if p.post_id in seen:
            raise DumpParseError(f"duplicate Id {p.post_id}")
        seen.add(p.post_id)
    return posts


# ---------------------------------------------------------------------------
# markup stripping

class _BodyStripper(HTMLParser):
    """Drops tags, replaces code blocks with a `<code>` token."""

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.chunks: list[str] = []
        self._code_depth = 0

    def handle_starttag(self, tag, attrs):
        if tag in ("code", "pre"):
            if self._code_depth == 0:
                self.chunks.append(" <code> ")
            self._code_depth += 1
        elif tag in ("p", "br", "div", "li"):
            self.chunks.append(" ")

    def handle_endtag(self, tag):
        if tag in ("code", "pre") and self._code_depth > 0:
            self._code_depth -= 1

    def handle_data(self, data):
        if self._code_depth == 0:
            self.chunks.append(data)


def strip_markup(body: str) -> str:
    """Plain text from an HTML-ish post body; LaTeX math spans survive as-is."""
    stripper = _BodyStripper()
    stripper.feed(unescape(body) if "&" in body and "<" not in body else body)
    stripper.close()
    text = "".join(stripper.chunks)
    return re.sub(r"[ \t]+", " ", text).strip()


# ---------------------------------------------------------------------------
# sentence segmentation

_MATH_RE = re.compile(r"\$\$.*?\$\$|\$.*?\$|\\\(.*?\\\)|\\\[.*?\\\]", re.DOTALL)


def _mask_math(text: str) -> str:
    """Replace math spans with same-length filler so terminators inside them
    are invisible to the splitter."""
    out = list(text)
    for m in _MATH_RE.finditer(text):
        for i in range(m.start(), m.end()):
            if not out[i].isspace():
                out[i] = "x"
    return "".join(out)


def segment_sentences(text: str) -> list[Sentence]:
    """Split on {., ?, !} followed by whitespace+uppercase or end-of-text.

    Never splits inside math spans or decimal numbers, nor right after a
    single-letter abbreviation. Spans index into the original text.
    """
    if not text or not text.strip():
        raise ValueError("cannot segment empty text")
    masked = _mask_math(text)
    n = len(text)
    boundaries: list[int] = []  # index one past the terminator
    for i, ch in enumerate(masked):
        if ch not in ".?!":
            continue
        # decimal number: digit on both sides of a period
        if ch == "." and i + 1 < n and masked[i + 1].isdigit():
            continue
        # single-letter abbreviation: ". " after a lone letter
        if ch == ".":
            if i >= 1 and masked[i - 1].isalpha() and (i == 1 or not masked[i - 2].isalnum()):
                continue
        j = i + 1
        while j < n and text[j].isspace():
            j += 1
        if j >= n:
            boundaries.append(i + 1)
        elif j > i + 1 and text[j].isupper():
            boundaries.append(i + 1)
    boundaries.append(n)

    sentences: list[Sentence] = []
    start = 0
    for b in boundaries:
        raw = text[start:b]
        # trim leading/trailing whitespace but keep spans into the original
        lead = len(raw) - len(raw.lstrip())
        trail = len(raw) - len(raw.rstrip())
        s, e = start + lead, b - trail
        if e > s:
            sentences.append(Sentence(index=len(sentences), text=text[s:e], char_span=(s, e)))
        start = b
    if not sentences:
        raise ValueError("no sentences found")
    return sentences


# ---------------------------------------------------------------------------
# filtering

@dataclass
class FilterReport:
    dropped_excluded: int = 0
    dropped_no_concept_tags: int = 0
    dropped_too_many_tags: int = 0
    dropped_no_accepted_answer: int = 0
    dropped_dangling_answer: int = 0
    kept: int = 0


def default_policy(concepts: list[Concept]) -> TagPolicy:
    return TagPolicy(
        excluded=set(DEFAULT_EXCLUDED),
        ignored=set(DEFAULT_IGNORED),
        allowed_concepts={c.id for c in concepts},
        max_tags=3,
    )


def filter_problems(
    posts: list[RawPost], policy: TagPolicy
) -> tuple[list[Problem], list[Answer], FilterReport]:
    """Apply the tag policy and accepted-answer requirement.

    Order-independent: the surviving set depends only on post contents. The
    output is sorted by problem id for reproducibility.
    """
    by_id = {p.post_id: p for p in posts}
    report = FilterReport()
    problems: list[Problem] = []
    answers: list[Answer] = []
    for post in sorted(posts, key=lambda p: p.post_id):
        if post.post_type != "question":
            continue
        tags = [t.strip().lower() for t in post.tags]
        if any(t in policy.excluded for t in tags):
            report.dropped_excluded += 1
            continue
        concept_tags = {
            t for t in tags if t not in policy.ignored and t in policy.allowed_concepts
        }
        if not concept_tags:
            report.dropped_no_concept_tags += 1
            continue
        if len(concept_tags) > policy.max_tags:
            report.dropped_too_many_tags += 1
            continue
        if not post.accepted_answer_id:
            report.dropped_no_accepted_answer += 1
            continue
        accepted = by_id.get(post.accepted_answer_id)
        if accepted is None or accepted.post_type != "answer":
            report.dropped_dangling_answer += 1
            continue
        text = strip_markup(post.body)
        if not text.strip():
            report.dropped_dangling_answer += 1
            continue
        problems.append(
            Problem(
                id=post.post_id,
                text=text,
                sentences=segment_sentences(text),
                concept_tags=concept_tags,
                answer_id=accepted.post_id,
            )
        )
        answers.append(
            Answer(
                id=accepted.post_id,
                problem_id=post.post_id,
                text=strip_markup(accepted.body),
            )
        )
        report.kept += 1
    return problems, answers, report


# ---------------------------------------------------------------------------
# splits

DEFAULT_FRACTIONS = (904 / 1171, 110 / 1171, 157 / 1171)


def assign_splits(
    problems: list[Problem],
    fractions: tuple[float, float, float] = DEFAULT_FRACTIONS,
    seed: int = 0,
) -> dict[str, str]:
    """Deterministic split assignment; remainder after rounding goes to train."""
    if not problems:
        raise ValueError("cannot split an empty problem list")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ValueError("fractions must sum to 1")
    n = len(problems)
    n_dev = int(round(fractions[1] * n))
    n_test = int(round(fractions[2] * n))
    n_train = n - n_dev - n_test
    if n_train < 0:
        raise ValueError("fractions round to more than the problem count")
    ids = sorted(p.id for p in problems)
    rng = np.random.default_rng(seed)
    rng.shuffle(ids)
    assignment: dict[str, str] = {}
    for i, pid in enumerate(ids):
        if i < n_train:
            assignment[pid] = "train"
        elif i < n_train + n_dev:
            assignment[pid] = "dev"
        else:
            assignment[pid] = "test"
    for p in problems:
        p.split = assignment[p.id]
    return assignment


# ---------------------------------------------------------------------------
# concepts

def load_concepts(source: str | Path) -> list[Concept]:
    path = Path(source)
    concepts: list[Concept] = []
    names: set[str] = set()
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        if obj["name"] in names:
            raise ValueError(f"duplicate concept name {obj['name']!r}")
        names.add(obj["name"])
        concepts.append(
            Concept(
                id=obj["id"],
                name=obj["name"],
                chapter=int(obj["chapter"]),
                section=int(obj["section"]),
                order_index=int(obj["order"]),
                definitions=list(obj.get("definitions") or []),
                examples=list(obj.get("examples") or []),
            )
        )
    if not concepts:
        raise ValueError(f"no concepts in {path}")
    if len({c.order_index for c in concepts}) != len(concepts):
        raise ValueError("order_index values must be unique")
    return concepts


def shipped_concepts_path() -> Path:
    return Path(__file__).parent / "data" / "concepts.jsonl"


# ---------------------------------------------------------------------------
# corpus (de)serialization

def save_corpus(corpus: Corpus, out_dir: str | Path):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with (out / "problems.jsonl").open("w", encoding="utf-8") as fh:
        for p in corpus.problems:
            fh.write(
                json.dumps(
                    {
                        "id": p.id,
                        "text": p.text,
                        "sentences": [
                            {"index": s.index, "text": s.text, "char_span": list(s.char_span)}
                            for s in p.sentences
                        ],
                        "concept_tags": sorted(p.concept_tags),
                        "answer_id": p.answer_id,
                        "split": p.split,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
    with (out / "answers.jsonl").open("w", encoding="utf-8") as fh:
        for a in corpus.answers:
            fh.write(
                json.dumps(
                    {"id": a.id, "problem_id": a.problem_id, "text": a.text},
                    ensure_ascii=False,
                )
                + "\n"
            )


def load_corpus(in_dir: str | Path) -> Corpus:
    src = Path(in_dir)
    problems = []
    for line in (src / "problems.jsonl").read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        problems.append(
            Problem(
                id=obj["id"],
                text=obj["text"],
                sentences=[
                    Sentence(s["index"], s["text"], tuple(s["char_span"]))
                    for s in obj["sentences"]
                ],
                concept_tags=set(obj["concept_tags"]),
                answer_id=obj["answer_id"],
                split=obj.get("split", "train"),
            )
        )
    answers = []
    for line in (src / "answers.jsonl").read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        answers.append(Answer(obj["id"], obj["problem_id"], obj["text"]))
    return Corpus(problems=problems, answers=answers)


def tokenize(text: str) -> list[str]:
    """Whitespace tokenization; math spans count as single tokens when they
    contain no spaces, which is all the embedding layer needs."""
    return text.split()
