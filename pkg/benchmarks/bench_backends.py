#!/usr/bin/env python3
"""Benchmark: compiled quadrature core vs pure numpy fallback.

The adaptive panel loop is the hot inner loop of every verification
workload (transform tables, moment sequences, ratio checks); the linear
algebra around it is numpy either way.  Run after `pip install -e .`:

    python3 benchmarks/bench_backends.py
"""

import time

import numpy as np

from hankellab import _panels as P
from hankellab import _pykern

try:
    from hankellab import _ckern
except ImportError:
    _ckern = None


def bench(label, fn, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return label, best


def laplace_table(impl, ts):
    for t in ts:
        impl.integrate_family(P.FID_LAPLACE_DOWN, 1.0, t, 0, P.edges_laplace_down(t), 1e-10)
        e = P.edges_laplace_up(t)
        if e is not None:
            impl.integrate_family(P.FID_LAPLACE_UP, 1.0, t, 0, e, 1e-10)


def moment_table(impl, jmax):
    for j in range(jmax + 1):
        impl.integrate_family(P.FID_MOMENT_POS, 1.0, float(j), 0, P.edges_moment_pos(j), 1e-10)
        impl.integrate_family(P.FID_MOMENT_NEG, 1.0, float(j), 0, P.edges_moment_neg(j), 1e-10)


def lemma_table(impl):
    for t in np.geomspace(1e2, 1e8, 25):
        impl.integrate_family(P.FID_LEMMA_DOWN, 1.0, float(t), 0, P.edges_lemma_down(0.5, t), 1e-9)
    for t in np.geomspace(1e-8, 1e-2, 25):
        impl.integrate_family(P.FID_LEMMA_UP, 1.0, float(t), 0, P.edges_lemma_up(2.0, t, 0), 1e-9)


def main():
    ts = np.geomspace(1e-6, 1e6, 200)
    workloads = [
        ("transform table, 200 points", lambda impl: laplace_table(impl, ts)),
        ("moment table, j <= 256", lambda impl: moment_table(impl, 256)),
        ("ratio tables, 50 points", lambda impl: lemma_table(impl)),
    ]
    impls = [("python", _pykern)]
    if _ckern is not None:
        impls.insert(0, ("compiled", _ckern))
    else:
        print("compiled core not built; benchmarking the fallback only")

    print(f"{'workload':<32} " + " ".join(f"{name:>12}" for name, _ in impls) + f" {'speedup':>9}")
    for wname, work in workloads:
        times = []
        for _, impl in impls:
            _, t = bench(wname, lambda impl=impl, work=work: work(impl))
            times.append(t)
        cells = " ".join(f"{t * 1e3:>10.1f}ms" for t in times)
        speedup = f"{times[-1] / times[0]:>8.1f}x" if len(times) == 2 else " " * 9
        print(f"{wname:<32} {cells} {speedup}")

    # agreement spot check
    a = impls[0][1].integrate_family(P.FID_MOMENT_POS, 1.0, 100.0, 0, P.edges_moment_pos(100), 1e-10)
    b = impls[-1][1].integrate_family(P.FID_MOMENT_POS, 1.0, 100.0, 0, P.edges_moment_pos(100), 1e-10)
    print(f"\nbackend agreement on a sample moment: {abs(a - b):.3e} absolute")


if __name__ == "__main__":
    main()
