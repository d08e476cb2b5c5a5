"""Synthetic corpora with planted unknown-cue sentences and concept vocab.

Used by the end-to-end tests and benchmarks: one sentence per problem gets a
cue phrase ("what is the probability that ...") and the other sentences are
filler, so a trained model has a recoverable signal.
"""

from __future__ import annotations

import numpy as np

from .corpus import Answer, Corpus, Problem, assign_splits, segment_sentences

CUE_PHRASES = [
    "How could one derive the joint pdf of the pair",
    "How to derive the formula of the t-test statistic",
    "How do you calculate the expected value of the sum",
    "I want to calculate the variance of the average",
    "What is the probability that the waiting time is six minutes or less",
    "What is the probability that zero people in the group are fatigued",
    "How do we prove that the pair is not bivariate normal",
    "I want to prove that the output is independent of the input distribution",
]

FILLER_SENTENCES = [
    "Suppose we observe a sample of independent draws from this model",
    "The instructor gave us a table of values for reference",
    "Assume the trials are independent and the rate stays constant",
    "My textbook discusses a similar setup in an earlier exercise",
    "We denote the sample size by n and the observations by x",
    "Here is the setup that was described in the lecture notes",
    "The measurements were collected over several consecutive days",
    "I already simplified the algebra but got stuck at this step",
]

CONCEPT_VOCAB = {
    "variance": ["variance", "spread", "squared deviation"],
    "expected-value": ["expectation", "mean value", "average outcome"],
    "poisson-distribution": ["poisson", "arrival rate", "counts per interval"],
    "binomial-distribution": ["binomial", "successes", "bernoulli trials"],
    "conditional-probability": ["conditional", "given event", "bayes rule"],
    "normal": ["gaussian curve", "bell shaped", "standard normal"],
}


def make_synthetic_corpus(
    n_problems: int,
    seed: int = 0,
    min_sentences: int = 3,
    max_sentences: int = 8,
    fractions=(0.8, 0.1, 0.1),
) -> tuple[Corpus, dict[str, list[int]]]:
    """Problems of 3-8 sentences, one planted cue sentence each.

    Returns the corpus (with splits assigned) and gold per-sentence labels.
    """
    rng = np.random.default_rng(seed)
    concepts = sorted(CONCEPT_VOCAB)
    problems: list[Problem] = []
    answers: list[Answer] = []
    gold: dict[str, list[int]] = {}
    for i in range(n_problems):
        pid = f"syn{i:05d}"
        concept = concepts[int(rng.integers(len(concepts)))]
        n_sent = int(rng.integers(min_sentences, max_sentences + 1))
        cue_pos = int(rng.integers(n_sent))
        vocab = CONCEPT_VOCAB[concept]
        sentences = []
        for j in range(n_sent):
            if j == cue_pos:
                cue = CUE_PHRASES[int(rng.integers(len(CUE_PHRASES)))]
                sentences.append(f"{cue} for the {vocab[int(rng.integers(len(vocab)))]}?")
            else:
                filler = FILLER_SENTENCES[int(rng.integers(len(FILLER_SENTENCES)))]
                sentences.append(f"{filler} about the {vocab[int(rng.integers(len(vocab)))]}.")
        text = " ".join(sentences)
        problems.append(
            Problem(
                id=pid,
                text=text,
                sentences=segment_sentences(text),
                concept_tags={concept},
                answer_id=f"a{pid}",
            )
        )
        answers.append(
            Answer(
                id=f"a{pid}",
                problem_id=pid,
                text=f"The answer uses the {vocab[0]} and standard identities.",
            )
        )
        gold[pid] = [1 if j == cue_pos else 0 for j in range(n_sent)]
    corpus = Corpus(problems=problems, answers=answers)
    assign_splits(corpus.problems, fractions, seed)
    for p in corpus.problems:
        if len(gold[p.id]) != len(p.sentences):
            raise AssertionError(
                f"segmentation disagrees with construction for {p.id}"
            )
    return corpus, gold
