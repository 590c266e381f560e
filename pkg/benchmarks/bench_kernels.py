#!/usr/bin/env python3
"""Benchmark: compiled kernels vs the NumPy fallback.

Times the four kernels on synthetic workloads plus two end-to-end fits
(k selection and a forest), switching backends in place. Verifies along
the way that both backends return identical results.

Usage: python benchmarks/bench_kernels.py [--repeats 3]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from ventureval import _kernels, cluster, learn


def timed(fn, repeats):
    best = float("inf")
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - start)
    return best, result


def bench(name, make_fn, repeats, results):
    times = {}
    outputs = {}
    for backend in _kernels.available_backends():
        _kernels.set_backend(backend)
        times[backend], outputs[backend] = timed(make_fn(), repeats)
    if len(outputs) == 2:
        a, b = outputs["py"], outputs["c"]
        same = (
            np.array_equal(a, b)
            if isinstance(a, np.ndarray)
            else a == b
        )
        assert same, f"backend mismatch in {name}"
    results.append((name, times))


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    results: list[tuple[str, dict]] = []

    x_big = rng.integers(0, 2, size=(2000, 108)).astype(np.int32)
    modes = rng.integers(0, 2, size=(30, 108)).astype(np.int32)
    bench(
        "hamming_matrix 2000x108 vs 30",
        lambda: lambda: _kernels.hamming_matrix(x_big, modes),
        args.repeats,
        results,
    )

    x_pair = rng.integers(0, 2, size=(1200, 108)).astype(np.int32)
    bench(
        "pairwise_hamming 1200x108",
        lambda: lambda: _kernels.pairwise_hamming(x_pair),
        args.repeats,
        results,
    )

    counts = rng.integers(1, 50, size=(30, 108)).astype(np.float64)
    sizes = rng.integers(50, 80, size=30).astype(np.float64)
    match_cost = 1.0 - counts / sizes[:, None]
    bench(
        "frequency_dissim 2000x108 vs 30",
        lambda: lambda: _kernels.frequency_dissim(x_big, modes, match_cost),
        args.repeats,
        results,
    )

    xs = rng.integers(0, 2, size=(600, 108)).astype(np.int32)
    ys = rng.integers(0, 2, size=600).astype(np.int8)
    rows = np.arange(600, dtype=np.int64)
    feats = np.arange(108, dtype=np.int64)
    bench(
        "best_categorical_split 600x108",
        lambda: lambda: _kernels.best_categorical_split(xs, ys, rows, feats),
        args.repeats,
        results,
    )

    krows = [tuple(int(v) for v in rng.integers(0, 2, size=40)) for _ in range(300)]

    def kmodes_job():
        fit = cluster.kmodes_fit(krows, 8, seed=1, restarts=5)
        return (fit.cost, fit.assignments.tolist())

    bench("kmodes n=300 m=40 k=8 x5 restarts", lambda: kmodes_job, 1, results)

    fx = rng.integers(0, 2, size=(200, 108)).astype(np.float64)
    fy = (fx[:, 3] + fx[:, 60] >= 1).astype(np.int8)
    ds = learn.LabeledDataset(
        x=fx, y=fy, feature_names=[f"f{i}" for i in range(108)]
    )

    def forest_job():
        forest = learn.forest_fit(ds, n_trees=200, seed=0)
        return [learn.predict_proba(forest, row) for row in fx[:10]]

    bench("forest 200x108, 200 trees", lambda: forest_job, 1, results)

    width = max(len(name) for name, _ in results)
    have_c = "c" in _kernels.available_backends()
    header = f"{'benchmark'.ljust(width)}    py (s)"
    if have_c:
        header += "      c (s)    speedup"
    print(header)
    for name, times in results:
        line = f"{name.ljust(width)}  {times['py']:>8.4f}"
        if have_c:
            line += f"  {times['c']:>9.4f}  {times['py'] / times['c']:>8.1f}x"
        print(line)


if __name__ == "__main__":
    main()
