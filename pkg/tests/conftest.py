import numpy as np
import pytest

from punk.corpus import (
    Answer,
    Concept,
    Corpus,
    Problem,
    assign_splits,
    segment_sentences,
)
from punk.embed_store import fake_embeddings


def make_problem(pid, text, tags, answer_id=None, split="train"):
    return Problem(
        id=pid,
        text=text,
        sentences=segment_sentences(text),
        concept_tags=set(tags),
        answer_id=answer_id or f"a{pid}",
        split=split,
    )


@pytest.fixture
def toy_concepts():
    return [
        Concept("variance", "Variance", chapter=3, section=3, order_index=53),
        Concept("expected-value", "Expected Value", chapter=3, section=1, order_index=49),
        Concept("poisson-distribution", "The Poisson Distribution", chapter=2,
                section=3, order_index=29),
    ]


@pytest.fixture
def toy_corpus():
    texts = {
        "p1": "Suppose X is a random draw. What is the variance of X?",
        "p2": "A machine produces parts. I want to calculate the expected value of the count.",
        "p3": "Calls arrive at a fixed rate. What is the probability that zero calls arrive?",
        "p4": "Two dice are rolled. How do we compute the spread of the sum? The answer should be exact.",
    }
    tags = {
        "p1": ["variance"],
        "p2": ["expected-value"],
        "p3": ["poisson-distribution"],
        "p4": ["variance", "expected-value"],
    }
    problems = [make_problem(pid, texts[pid], tags[pid]) for pid in sorted(texts)]
    answers = [
        Answer(f"a{pid}", pid, f"The answer to {pid} uses standard identities.")
        for pid in sorted(texts)
    ]
    problems[2].split = "dev"
    return Corpus(problems=problems, answers=answers)


@pytest.fixture
def toy_table(toy_corpus, toy_concepts):
    return fake_embeddings(toy_corpus, seed=7, dim=12, concepts=toy_concepts)


def bind_and_check(params, build_loss, eps=1e-4):
    """Gradcheck helper: rebinds a ParamSet's tensors to the checker's leaves."""
    from punk.kernels.autodiff import Tensor
    from punk.kernels.gradcheck import grad_check

    arrays = {k: t.data.copy() for k, t in params.items()}

    def fn(leaves):
        params.tensors = leaves
        return build_loss()

    err = grad_check(fn, arrays, eps=eps)
    params.tensors = {k: Tensor(v) for k, v in arrays.items()}
    return err
