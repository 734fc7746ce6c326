"""Compare the compiled kernels against the numpy / pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import timeit

import numpy as np

from epsnash import _pykernels

try:
    from epsnash import _ckernels
except ImportError:
    _ckernels = None


def _random_adj(n, p, seed):
    rng = np.random.default_rng(seed)
    adj = (rng.random((n, n)) < p).astype(np.uint8)
    np.fill_diagonal(adj, 0)
    return adj


def cases():
    levels = np.linspace(0.0, 10.0, 101)
    adj = _random_adj(200, 0.05, 0)
    return [
        ("grid Nash n=3, 101 levels", "security_grid_nash", (3, levels, 10.0)),
        ("BFS all pairs, n=200", "bfs_distances", (adj,)),
        ("betweenness, n=200", "betweenness_sums", (adj,)),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"{'kernel':30s} {'python [s]':>11s} {'cython [s]':>11s} {'speedup':>8s}")
    for label, name, argv in cases():
        py = min(timeit.repeat(lambda: getattr(_pykernels, name)(*argv), number=1, repeat=args.repeat))
        if _ckernels is None:
            print(f"{label:30s} {py:11.4f} {'n/a':>11s} {'n/a':>8s}")
            continue
        cy = min(timeit.repeat(lambda: getattr(_ckernels, name)(*argv), number=1, repeat=args.repeat))
        print(f"{label:30s} {py:11.4f} {cy:11.4f} {py / cy:7.1f}x")


if __name__ == "__main__":
    main()
