"""Encoders over token matrices: bag-of-words, text CNN, BiLSTM/BiGRU, MLP.

Each encoder owns a slice of a shared ParamSet (prefixed names) and maps a
(T, d) float token matrix to a fixed-size Tensor on the autodiff tape.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor
from .params import ParamSet


@dataclass
class EncoderConfig:
    kind: str = "cnn"  # bow | cnn | lstm | gru | mlp
    widths: list[int] = field(default_factory=lambda: [3, 4, 5, 6])
    kernels_per_width: int = 192
    hidden: int = 384
    layers: int = 3
    dropout: float = 0.0

    def out_dim(self, in_dim: int) -> int:
        if self.kind == "bow":
            return in_dim
        if self.kind == "cnn":
            return len(self.widths) * self.kernels_per_width
        if self.kind in ("lstm", "gru"):
            return 2 * self.hidden
        if self.kind == "mlp":
            return self.hidden
        raise ValueError(f"unknown encoder kind {self.kind!r}")


class BowEncoder:
    """Average pooling over token rows; no parameters."""

    def __init__(self, in_dim: int):
        self.out_dim = in_dim

    def encode(self, tokens: np.ndarray) -> Tensor:
        return Tensor(tokens.mean(axis=0))


class ConvTextEncoder:
    """Multi-width 1-D convolution, ReLU, max-over-time, concatenated."""

    def __init__(self, cfg: EncoderConfig, in_dim: int, params: ParamSet, prefix: str):
        self.widths = list(cfg.widths)
        self.n_kernels = cfg.kernels_per_width
        self.in_dim = in_dim
        self.params = params
        self.prefix = prefix
        for k in self.widths:
            params.add_weight(f"{prefix}.w{k}", (k * in_dim, self.n_kernels))
            params.add_bias(f"{prefix}.b{k}", (self.n_kernels,))
        self.out_dim = len(self.widths) * self.n_kernels

    def encode(self, tokens: np.ndarray) -> Tensor:
        if tokens.shape[1] != self.in_dim:
            raise ValueError(
                f"token dim {tokens.shape[1]} != encoder dim {self.in_dim}"
            )
        max_w = max(self.widths)
        if tokens.shape[0] < max_w:
            pad = np.zeros((max_w - tokens.shape[0], self.in_dim))
            tokens = np.vstack([tokens, pad])
        x = Tensor(tokens)
        parts = []
        for k in self.widths:
            win = ad.sliding_windows(x, k)
            scores = ad.add(
                ad.matmul(win, self.params[f"{self.prefix}.w{k}"]),
                self.params[f"{self.prefix}.b{k}"],
            )
            parts.append(ad.tmax(ad.relu(scores), axis=0))
        return ad.concat(parts) if len(parts) > 1 else parts[0]


class RnnEncoder:
    """One-layer bidirectional LSTM or GRU; concatenates final hidden states."""

    def __init__(self, cfg: EncoderConfig, in_dim: int, params: ParamSet, prefix: str):
        if cfg.hidden <= 0:
            raise ValueError("hidden size must be positive")
        self.cell = cfg.kind
        if self.cell not in ("lstm", "gru"):
            raise ValueError(f"not an rnn kind: {cfg.kind!r}")
        self.hidden = cfg.hidden
        self.in_dim = in_dim
        self.params = params
        self.prefix = prefix
        gates = ("i", "f", "g", "o") if self.cell == "lstm" else ("z", "r", "n")
        for direction in ("fw", "bw"):
            for gate in gates:
                params.add_weight(f"{prefix}.{direction}.wx{gate}", (in_dim, cfg.hidden))
                params.add_weight(f"{prefix}.{direction}.wh{gate}", (cfg.hidden, cfg.hidden))
                params.add_bias(f"{prefix}.{direction}.b{gate}", (cfg.hidden,))
        self.out_dim = 2 * cfg.hidden

    def _gate(self, direction, gate, x, h):
        p = self.params
        pre = ad.add(
            ad.add(
                ad.matmul(x, p[f"{self.prefix}.{direction}.wx{gate}"]),
                ad.matmul(h, p[f"{self.prefix}.{direction}.wh{gate}"]),
            ),
            p[f"{self.prefix}.{direction}.b{gate}"],
        )
        return pre

    def _run(self, tokens: np.ndarray, direction: str) -> Tensor:
        h = Tensor(np.zeros(self.hidden))
        c = Tensor(np.zeros(self.hidden))
        rows = tokens if direction == "fw" else tokens[::-1]
        for t in range(rows.shape[0]):
            x = Tensor(rows[t])
            if self.cell == "lstm":
                i = ad.sigmoid(self._gate(direction, "i", x, h))
                f = ad.sigmoid(self._gate(direction, "f", x, h))
                g = ad.tanh(self._gate(direction, "g", x, h))
                o = ad.sigmoid(self._gate(direction, "o", x, h))
                c = ad.add(ad.mul(f, c), ad.mul(i, g))
                h = ad.mul(o, ad.tanh(c))
            else:
                z = ad.sigmoid(self._gate(direction, "z", x, h))
                r = ad.sigmoid(self._gate(direction, "r", x, h))
                p = self.params
                n_pre = ad.add(
                    ad.add(
                        ad.matmul(x, p[f"{self.prefix}.{direction}.wxn"]),
                        ad.mul(r, ad.matmul(h, p[f"{self.prefix}.{direction}.whn"])),
                    ),
                    p[f"{self.prefix}.{direction}.bn"],
                )
                n = ad.tanh(n_pre)
                one = Tensor(np.ones(self.hidden))
                h = ad.add(ad.mul(ad.sub(one, z), n), ad.mul(z, h))
        return h

    def encode(self, tokens: np.ndarray) -> Tensor:
        if tokens.shape[1] != self.in_dim:
            raise ValueError(
                f"token dim {tokens.shape[1]} != encoder dim {self.in_dim}"
            )
        return ad.concat([self._run(tokens, "fw"), self._run(tokens, "bw")])


class Mlp:
    """Hidden layers of affine+ReLU, then a final affine with no activation."""

    def __init__(self, in_dim: int, hidden: int, layers: int, out_dim: int,
                 params: ParamSet, prefix: str):
        self.params = params
        self.prefix = prefix
        self.layers = layers
        dims = [in_dim] + [hidden] * layers + [out_dim]
        for i in range(len(dims) - 1):
            params.add_weight(f"{prefix}.w{i}", (dims[i], dims[i + 1]))
            params.add_bias(f"{prefix}.b{i}", (dims[i + 1],))
        self.out_dim = out_dim

    def forward(self, x: Tensor) -> Tensor:
        h = x
        for i in range(self.layers + 1):
            h = ad.add(
                ad.matmul(h, self.params[f"{self.prefix}.w{i}"]),
                self.params[f"{self.prefix}.b{i}"],
            )
            if i < self.layers:
                h = ad.relu(h)
        return h


def make_sequence_encoder(cfg: EncoderConfig, in_dim: int, params: ParamSet,
                          prefix: str):
    """Encoder for a (T, d) token matrix per the configured kind."""
    if cfg.kind == "bow":
        return BowEncoder(in_dim)
    if cfg.kind == "cnn":
        return ConvTextEncoder(cfg, in_dim, params, prefix)
    if cfg.kind in ("lstm", "gru"):
        return RnnEncoder(cfg, in_dim, params, prefix)
    raise ValueError(f"unsupported sequence encoder {cfg.kind!r}")
