"""Compare the compiled gather_segment_sum against the numpy fallback.

Run:
    python3 benchmarks/bench_graphops.py
"""

import time

import numpy as np

from punk.kernels import graphops


def numpy_gather_segment_sum(x, src, dst, n_out):
    out = np.zeros((n_out, x.shape[1]))
    np.add.at(out, dst, x[src])
    return out


def bench(fn, x, src, dst, n_out, repeats=5):
    fn(x, src, dst, n_out)  # warm up
    best = float("inf")
    for _r in range(repeats):
        t0 = time.perf_counter()
        fn(x, src, dst, n_out)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    print(f"active backend: {graphops.BACKEND}")
    rng = np.random.default_rng(0)
    header = f"{'nodes':>8} {'edges':>9} {'dim':>5} {'numpy':>10} {'compiled':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for n_nodes, n_edges, dim in [
        (1_000, 10_000, 64),
        (5_000, 100_000, 128),
        (20_000, 500_000, 128),
        (50_000, 2_000_000, 64),
    ]:
        x = rng.normal(size=(n_nodes, dim))
        src = rng.integers(0, n_nodes, size=n_edges)
        dst = rng.integers(0, n_nodes, size=n_edges)
        t_np = bench(numpy_gather_segment_sum, x, src, dst, n_nodes)
        t_fast = bench(graphops.gather_segment_sum, x, src, dst, n_nodes)
        a = numpy_gather_segment_sum(x, src, dst, n_nodes)
        b = graphops.gather_segment_sum(x, src, dst, n_nodes)
        assert np.allclose(a, b, atol=1e-10), "backends disagree"
        print(f"{n_nodes:>8} {n_edges:>9} {dim:>5} {t_np:>9.4f}s {t_fast:>9.4f}s "
              f"{t_np / t_fast:>7.2f}x")


if __name__ == "__main__":
    main()
