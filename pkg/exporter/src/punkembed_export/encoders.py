"""Token encoders: an offline deterministic one and an optional HF wrapper."""

from __future__ import annotations

import hashlib

import numpy as np


class HashedEncoder:
    """Deterministic context-free encoder for offline runs and tests.

    Each whitespace token maps to a fixed uniform(-1, 1) vector derived from
    a keyed blake2b hash, so reruns are bit-identical.
    """

    name = "hashed"
    deterministic = True
    tokenization = "whitespace tokens; one fixed vector per token string"

    def __init__(self, dim: int = 768, seed: int = 0):
        self.dim = dim
        self.seed = seed
        self._cache: dict[str, np.ndarray] = {}

    def version(self) -> str:
        return f"hashed-v1(seed={self.seed})"

    def _vector(self, token: str) -> np.ndarray:
        if token not in self._cache:
            digest = hashlib.blake2b(
                token.encode("utf-8"), digest_size=8,
                salt=str(self.seed).encode()[:16],
            ).digest()
            rng = np.random.default_rng(int.from_bytes(digest, "little"))
            self._cache[token] = rng.uniform(-1.0, 1.0, size=self.dim)
        return self._cache[token]

    def encode(self, text: str) -> np.ndarray:
        tokens = text.split()
        if not tokens:
            raise ValueError("empty text")
        return np.stack([self._vector(t.lower()) for t in tokens])


class HuggingFaceEncoder:
    """Pretrained transformer encoder with subword-to-word mean alignment.

    Each whitespace word's vector is the mean of its subword vectors from the
    model's last hidden state.
    """

    name = "huggingface"
    deterministic = False
    tokenization = "whitespace words; word vector = mean of subword vectors"

    def __init__(self, model_name: str = "bert-base-uncased"):
        import torch  # noqa: F401  (required by transformers models)
        from transformers import AutoModel, AutoTokenizer

        self.model_name = model_name
        self.tokenizer = AutoTokenizer.from_pretrained(model_name)
        self.model = AutoModel.from_pretrained(model_name)
        self.model.eval()
        self.dim = int(self.model.config.hidden_size)

    def version(self) -> str:
        return self.model_name

    def encode(self, text: str) -> np.ndarray:
        import torch

        words = text.split()
        if not words:
            raise ValueError("empty text")
        enc = self.tokenizer(words, is_split_into_words=True,
                             return_tensors="pt", truncation=True)
        with torch.no_grad():
            hidden = self.model(**enc).last_hidden_state[0].numpy()
        word_ids = enc.word_ids(0)
        rows = []
        for w in range(len(words)):
            idx = [i for i, wid in enumerate(word_ids) if wid == w]
            if idx:
                rows.append(hidden[idx].mean(axis=0))
            else:  # truncated word: fall back to the sequence mean
                rows.append(hidden.mean(axis=0))
        return np.stack(rows)


def make_encoder(spec: str, dim: int, seed: int):
    """'hashed' or 'hf:<model-name>'."""
    if spec == "hashed":
        return HashedEncoder(dim=dim, seed=seed)
    if spec.startswith("hf:"):
        return HuggingFaceEncoder(spec[3:])
    raise ValueError(f"unknown encoder {spec!r} (use 'hashed' or 'hf:<model>')")
