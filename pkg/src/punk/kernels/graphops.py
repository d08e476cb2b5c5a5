"""Graph message aggregation with a compiled fast path.

The Cython extension is optional: when it failed to build we fall back to a
numpy implementation with identical numerics. `BACKEND` records which one is
active; benchmarks/bench_graphops.py compares the two.
"""

from __future__ import annotations

import numpy as np

from .autodiff import Tensor

try:  # pragma: no cover - depends on build environment
    from ._fastops import gather_segment_sum as _gather_segment_sum

    BACKEND = "cython"
except ImportError:  # pragma: no cover

    def _gather_segment_sum(x, src, dst, n_out):
        out = np.zeros((n_out, x.shape[1]))
        np.add.at(out, dst, x[src])
        return out

    BACKEND = "numpy"


def gather_segment_sum(x: np.ndarray, src: np.ndarray, dst: np.ndarray,
                       n_out: int) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=np.float64)
    src = np.ascontiguousarray(src, dtype=np.int64)
    dst = np.ascontiguousarray(dst, dtype=np.int64)
    return _gather_segment_sum(x, src, dst, int(n_out))


def neighbor_sum(x: Tensor, src: np.ndarray, dst: np.ndarray, n_out: int) -> Tensor:
    """out[u] = sum over edges (src=v, dst=u) of x[v], on the autodiff tape.

    The caller supplies the directed edge list (both directions for an
    undirected graph, plus self-loops if wanted).
    """
    src = np.ascontiguousarray(src, dtype=np.int64)
    dst = np.ascontiguousarray(dst, dtype=np.int64)
    out = gather_segment_sum(x.data, src, dst, n_out)

    def bwd(g):
        return (gather_segment_sum(np.ascontiguousarray(g), dst, src, x.data.shape[0]),)

    return Tensor(out, (x,), bwd)
