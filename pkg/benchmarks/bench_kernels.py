"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import time

from hypercycles import _pykernels, kernels
from hypercycles.cycles import _csr, enumerate_cycles
from hypercycles.hypergraph import Hypergraph
from hypercycles.random_model import sample


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases():
    K9 = Hypergraph.complete(9, 3)
    ptr, idx = _csr(K9)
    yield "enumerate C4 in K_9^(3)", lambda m: m.enumerate_cycles(
        ptr, idx, K9.edge_array, K9.n, 4, 10**9, False)[1]
    G = sample(10, 3, 0.3, 7)
    ptr2, idx2 = _csr(G)
    yield "enumerate C6 in G(10,0.3)^(3)", lambda m: m.enumerate_cycles(
        ptr2, idx2, G.edge_array, G.n, 6, 10**9, False)[1]
    H = sample(9, 3, 0.35, 3)
    masks = enumerate_cycles(H, 4).masks()
    e = len(H.edges)
    yield f"hitting set, {len(masks)} copies on {e} edges", lambda m: m.min_hitting_set(
        masks, e, 10**8)[:2]
    small = sample(8, 3, 0.4, 1)
    sm = enumerate_cycles(small, 4).masks()
    es = len(small.edges)
    yield f"free-subset scan over 2^{es}", lambda m: m.free_subset_stats(sm, es)[::2]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    compiled = [m for m in kernels.backends() if m is not _pykernels]
    if not compiled:
        print("compiled extension not built; only the Python backend is available")
    print(f"{'case':45s} {'python':>10s} {'cython':>10s} {'speedup':>8s}")
    for name, fn in cases():
        tp, out_p = best_of(lambda: fn(_pykernels), args.repeat)
        if compiled:
            tc, out_c = best_of(lambda: fn(compiled[0]), args.repeat)
            assert out_p == out_c, (name, out_p, out_c)
            print(f"{name:45s} {tp:10.4f} {tc:10.4f} {tp / tc:8.1f}x")
        else:
            print(f"{name:45s} {tp:10.4f} {'-':>10s}")


if __name__ == "__main__":
    main()
