"""Named parameter sets with seeded initialization."""

from __future__ import annotations

import numpy as np

from .autodiff import Tensor


class ParamSet:
    """Named parameter tensors plus the PRNG used to initialize them.

    Weights use uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out));
    biases start at zero. Matrix weights are stored (in_dim, out_dim).
    """

    def __init__(self, seed: int):
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.tensors: dict[str, Tensor] = {}

    def add_weight(self, name: str, shape: tuple[int, ...]) -> Tensor:
        if name in self.tensors:
            raise ValueError(f"duplicate parameter {name!r}")
        fan_in = int(np.prod(shape[:-1])) if len(shape) > 1 else shape[0]
        fan_out = shape[-1]
        a = np.sqrt(6.0 / (fan_in + fan_out))
        t = Tensor(self.rng.uniform(-a, a, size=shape))
        self.tensors[name] = t
        return t

    def add_bias(self, name: str, shape: tuple[int, ...]) -> Tensor:
        if name in self.tensors:
            raise ValueError(f"duplicate parameter {name!r}")
        t = Tensor(np.zeros(shape))
        self.tensors[name] = t
        return t

    def __getitem__(self, name: str) -> Tensor:
        return self.tensors[name]

    def __contains__(self, name: str) -> bool:
        return name in self.tensors

    def items(self):
        return self.tensors.items()

    def zero_grad(self):
        for t in self.tensors.values():
            t.grad = None

    def n_params(self) -> int:
        return sum(t.data.size for t in self.tensors.values())

    def state_arrays(self) -> dict[str, np.ndarray]:
        return {k: t.data for k, t in self.tensors.items()}

    def load_arrays(self, arrays: dict[str, np.ndarray]):
        for k, t in self.tensors.items():
            a = np.asarray(arrays[k], dtype=np.float64)
            if a.shape != t.data.shape:
                # stored payloads are flat rows; restore the declared shape
                a = a.reshape(t.data.shape)
            t.data = a
