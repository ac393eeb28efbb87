"""Time the numba kernels against the pure-numpy fallback.

Both backends are imported directly, so the RCPC_DISABLE_NUMBA flag does
not matter here.  Every timed call is checked to give the same answer on
both sides.

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --sizes 8 10 12 --repeat 5 --json out.json
"""
from __future__ import annotations

import argparse
import json
import platform
import random
import time

import numpy as np

from rcpc import _kernels_numba as knb
from rcpc import _kernels_numpy as knp
from rcpc.consensus import AdversaryModel, Constant, Scenario, Scope, _prepare
from rcpc.graph import build_graph


def dense_robust_graph(n: int, seed: int):
    rng = random.Random(seed)
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.85]
    return build_graph(n, edges, [rng.randrange(4) for _ in range(n)])


def best_of(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_checker(n: int, repeat: int) -> dict:
    # a graph that holds forces a full scan of all (3^n - 2^(n+1) + 1)/2 pairs
    g = dense_robust_graph(n, n)
    ranks = {c: k for k, c in enumerate(sorted(set(g.colors)))}
    colors = np.array([ranks[c] for c in g.colors], dtype=np.int64)
    args = (g.adjacency_bits, colors, g.n, len(ranks), 1)

    def run(k):
        full, cnt, cmask = k.rs_subset_tables(*args)
        return k.scan_rs(g.n, full, cnt, cmask, 1)

    a, b = run(knb), run(knp)
    assert a == b, (a, b)
    return {"kernel": "rs-check", "n": n, "pairs": (3 ** n - 2 ** (n + 1) + 1) // 2,
            "holds": bool(a[0] < 0),
            "numba_s": best_of(lambda: run(knb), repeat),
            "numpy_s": best_of(lambda: run(knp), repeat)}


def bench_simulation(n: int, T: int, repeat: int) -> dict:
    g = dense_robust_graph(n, 100 + n)
    c = g.colors[0]
    adv = frozenset(v for v in range(n) if g.colors[v] == c)
    sc = Scenario(g, None, AdversaryModel(Scope.F_TOTAL, len(adv), adv,
                                          Constant({v: 5.0 for v in adv})), T=T)
    args = _prepare(sc)
    F = sc.adversary.F

    def run(k):
        return k.simulate(*args, F, True, T, 1e-6, False, True, 1e-12)

    a, b = run(knb), run(knp)
    assert np.array_equal(a[0], b[0])
    return {"kernel": "simulate", "n": n, "T": T,
            "numba_s": best_of(lambda: run(knb), repeat),
            "numpy_s": best_of(lambda: run(knp), repeat)}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[8, 10, 12, 13])
    ap.add_argument("--T", type=int, default=10_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", help="also write the rows to this file")
    args = ap.parse_args()

    # first calls compile (or load from the numba cache); keep them untimed
    bench_checker(4, 1)
    bench_simulation(4, 10, 1)

    rows = []
    for n in args.sizes:
        rows.append(bench_checker(n, args.repeat))
        rows.append(bench_simulation(n, args.T, args.repeat))

    print(f"{'kernel':<10}{'n':>4}{'work':>12}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>9}")
    for r in rows:
        work = r.get("pairs", r.get("T"))
        print(f"{r['kernel']:<10}{r['n']:>4}{work:>12}{r['numba_s']:>12.4f}"
              f"{r['numpy_s']:>12.4f}{r['numpy_s'] / r['numba_s']:>8.1f}x")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"python": platform.python_version(), "rows": rows}, fh, indent=1)


if __name__ == "__main__":
    main()
