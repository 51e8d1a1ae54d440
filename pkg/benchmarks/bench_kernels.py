"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--n 2000] [--repeat 3]
"""

import argparse
import time

import numpy as np

from semtraj import _pykernels

try:
    from semtraj import _ckernels
except ImportError:
    _ckernels = None


def packed(n, vocab, seed):
    rng = np.random.default_rng(seed)
    feats = rng.uniform(0, 1, size=(n, 4))
    indptr, ids, counts = [0], [], []
    for _ in range(n):
        k = int(rng.integers(1, 8))
        ids += sorted(rng.choice(vocab, size=k, replace=False).tolist())
        counts += rng.integers(1, 30, size=k).tolist()
        indptr.append(len(ids))
    return feats, np.array(indptr), np.array(ids, dtype=np.int64), np.array(counts, dtype=np.int64)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--vocab", type=int, default=200)
    ap.add_argument("--pairs", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = [("numpy", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    data = packed(args.n, args.vocab, 0)
    rng = np.random.default_rng(1)
    seqs = [
        (rng.integers(0, 30, size=300).astype(np.int64), rng.integers(0, 30, size=300).astype(np.int64))
        for _ in range(args.pairs)
    ]

    print(f"{'kernel':<36}{'backend':<10}{'seconds':>10}")
    results = {}
    for name, mod in backends:
        index = mod.CompositeIndex(*data)
        cases = {
            f"neighbourhood queries (n={args.n})": lambda: [index.neighbors(i, 0.04) for i in range(args.n)],
            f"LCS, {args.pairs} pairs of length 300": lambda: [mod.lcs_length(a, b) for a, b in seqs],
        }
        for case, fn in cases.items():
            results[(case, name)] = best_of(fn, args.repeat)
            print(f"{case:<36}{name:<10}{results[(case, name)]:>10.4f}")
    if _ckernels:
        for case in {c for c, _ in results}:
            print(f"speed-up, {case}: {results[(case, 'numpy')] / results[(case, 'cython')]:.1f}x")
    else:
        print("compiled extension not built; only the numpy fallback was timed")


if __name__ == "__main__":
    main()
