#!/usr/bin/env python3
"""Benchmark the numba-jitted kernels against their pure-numpy fallbacks.

Runs each hot kernel on synthetic inputs of a few sizes, times both variants
and checks they agree. The kernels compile on first call; compilation time is
excluded by warming up before timing.

Usage:
    python3 benchmarks/bench_kernels.py [--sizes 200,500,1000] [--repeats 5]
"""

import argparse
import time

import numpy as np

from spheredepth import _kernels as k


def timeit(fn, args, repeats):
    fn(*args)  # warm-up (JIT compile / cache load)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def make_inputs(n, rng):
    X = rng.standard_normal((n, 8))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    G = X @ X.T
    labels = rng.integers(0, 5, n).astype(np.int64)
    labels[:5] = np.arange(5)
    S = k.gram_to_sim_numpy(G, 1)
    W = rng.dirichlet(np.ones(5), size=n)
    E = k.equivalence_matrix_numpy(W)
    perms = np.stack([rng.permutation(n) for _ in range(20)]).astype(np.int64)
    return {
        "gram_to_sim": (G, 0),
        "silhouette_samples": (S, labels, 5),
        "refine_medoids": (S, labels, 5),
        "pair_counts_brute": (labels, labels[::-1].copy()),
        "equivalence_matrix": (np.ascontiguousarray(W),),
        "permuted_absdiff_means": (E, E, perms),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", type=str, default="200,500,1500")
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    sizes = [int(tok) for tok in args.sizes.split(",")]

    if not k.USING_NUMBA:
        print("numba path inactive (SPHEREDEPTH_NO_NUMBA set or numba missing);")
        print("timing the numpy fallbacks only.\n")

    rng = np.random.default_rng(0)
    header = f"{'kernel':<24}{'n':>6}{'numpy':>12}{'numba':>12}{'speedup':>9}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        inputs = make_inputs(n, rng)
        for name, arg in inputs.items():
            np_fn = getattr(k, f"{name}_numpy")
            t_np = timeit(np_fn, arg, args.repeats)
            if k.USING_NUMBA:
                nb_fn = getattr(k, f"{name}_numba")
                t_nb = timeit(nb_fn, arg, args.repeats)
                a = np.asarray(np_fn(*arg), dtype=np.float64)
                b = np.asarray(nb_fn(*arg), dtype=np.float64)
                assert np.allclose(a, b, atol=1e-9), f"{name}: paths disagree"
                print(f"{name:<24}{n:>6}{t_np * 1e3:>10.2f}ms{t_nb * 1e3:>10.2f}ms{t_np / t_nb:>8.1f}x")
            else:
                print(f"{name:<24}{n:>6}{t_np * 1e3:>10.2f}ms{'-':>12}{'-':>9}")
    print()
    print(f"active path: {'numba' if k.USING_NUMBA else 'numpy'}")


if __name__ == "__main__":
    main()
