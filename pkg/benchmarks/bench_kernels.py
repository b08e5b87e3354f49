"""Compare the pure-numpy and compiled kernel backends.

Usage: python3 benchmarks/bench_kernels.py [--repeats N]

Times the four hot kernels on pipeline-shaped workloads and verifies the
two backends agree bit for bit on every input used.
"""
import argparse
import time

import numpy as np

from defakehop.backend import available_backends


def _timeit(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _tree_inputs(rng, n, d):
    X = np.ascontiguousarray(rng.normal(size=(n, d)))
    y = (X @ rng.normal(size=d) > 0).astype(float)
    p = 1.0 / (1.0 + np.exp(-rng.normal(size=n)))
    g = p - y
    h = p * (1 - p)
    sort_idx = np.ascontiguousarray(
        np.stack([np.argsort(X[:, j], kind="stable") for j in range(d)])
    ).astype(np.int64)
    return X, sort_idx, g, h


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    backends = available_backends()
    if "compiled" not in backends:
        print("compiled extension not available; nothing to compare")
        return
    rng = np.random.default_rng(0)

    patches = np.ascontiguousarray(rng.normal(size=(256, 32, 32, 3)))
    maps = np.ascontiguousarray(rng.normal(size=(256, 30, 30, 10)))
    X_stump, sidx_stump, g1, h1 = _tree_inputs(rng, 2000, 45)
    X_deep, sidx_deep, g2, h2 = _tree_inputs(rng, 2000, 630)

    cases = [
        ("extract_windows 256x32x32x3 k=3",
         lambda k: k.extract_windows(patches, 3, 3)),
        ("max_pool2 256x30x30x10",
         lambda k: k.max_pool2(maps)),
        ("build_tree depth=1 n=2000 d=45",
         lambda k: k.build_tree(X_stump, sidx_stump, g1, h1, 1, 1.0, 1.0)),
        ("build_tree depth=6 n=2000 d=630",
         lambda k: k.build_tree(X_deep, sidx_deep, g2, h2, 6, 1.0, 1.0)),
    ]

    print(f"{'kernel':<34} {'pure':>9} {'compiled':>9} {'speedup':>8}")
    for name, call in cases:
        out = {}
        times = {}
        for bname, backend in backends.items():
            times[bname] = _timeit(lambda: call(backend), args.repeats)
            out[bname] = call(backend)
        pure_out, comp_out = out["pure"], out["compiled"]
        if not isinstance(pure_out, tuple):
            pure_out, comp_out = (pure_out,), (comp_out,)
        for a, b in zip(pure_out, comp_out):
            assert np.asarray(a).tobytes() == np.asarray(b).tobytes(), \
                f"backend mismatch in {name}"
        ratio = times["pure"] / times["compiled"]
        print(f"{name:<34} {times['pure'] * 1e3:>7.1f}ms "
              f"{times['compiled'] * 1e3:>7.1f}ms {ratio:>7.1f}x")
    print("all outputs bit-identical across backends")


if __name__ == "__main__":
    main()
