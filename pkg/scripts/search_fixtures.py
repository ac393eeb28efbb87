"""Offline search for the bundled comparison fixtures.

Writes ``src/rcpc/data/{ftotal,flocal}_graph.json`` plus the two suite
files.  Run once; the outputs are committed and never regenerated by the
tests.

    python scripts/search_fixtures.py --seed 7
"""
from __future__ import annotations

import argparse
import json
import random
from itertools import combinations
from pathlib import Path

from rcpc.consensus import (AdversaryModel, Constant, Protocol, Scenario, Scope,
                            scenario_to_dict, simulate_outcome, validate_adversary_placement)
from rcpc.graph import ColoredGraph, build_graph
from rcpc.robustness import (enumerate_disjoint_pairs, is_r_robust_classic, is_r_robust_colored,
                             is_rs_robust_classic, is_rs_robust_colored)

DATA = Path(__file__).resolve().parents[1] / "src" / "rcpc" / "data"


def random_graph(rng: random.Random, n: int, m: int) -> ColoredGraph:
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    return build_graph(n, rng.sample(pairs, m), [0] * n)


def stuck_pairs(g: ColoredGraph, F: int, reach: int):
    """Pairs (S1, S2) where every node with >= reach outside neighbors is
    made adversarial and every other node of S1 ∪ S2 has <= F outside
    neighbors, so WMSR with parameter F freezes both sets."""
    for s1, s2 in enumerate_disjoint_pairs(g.n):
        adv = set()
        ok = True
        for S in (s1, s2):
            normal = 0
            for v in S:
                k = len(g.neighbors[v] - S)
                if k >= reach:
                    adv.add(v)
                elif k > F:
                    ok = False
                else:
                    normal += 1
            if not normal:
                ok = False
        if ok:
            yield s1, s2, frozenset(adv)


def colorings_with_sizes(n: int, sizes: tuple[int, ...], rng: random.Random):
    """Every coloring with the given class sizes (class 0 takes the nodes
    left over), in random order."""
    out = []

    def rec(c, free, colors):
        if c == len(sizes):
            out.append(list(colors))
            return
        for chosen in combinations(free, sizes[c]):
            for v in chosen:
                colors[v] = c
            rec(c + 1, [v for v in free if v not in chosen], colors)
            for v in chosen:
                colors[v] = 0

    rec(1, list(range(n)), [0] * n)
    rng.shuffle(out)
    return out


def scenario(g, s1, s2, adv, F, scope, protocol, seed=0):
    x0 = [0.5] * g.n
    for v in s1:
        x0[v] = 0.0
    for v in s2:
        x0[v] = 1.0
    values = {v: x0[v] for v in adv}
    return Scenario(g, x0, AdversaryModel(scope, F, adv, Constant(values)), protocol, seed=seed)


def search_ftotal(rng: random.Random):
    F = 3
    for attempt in range(200000):
        g = random_graph(rng, 8, rng.randint(16, 20))
        if not is_rs_robust_classic(g, 2, 2).holds or is_rs_robust_classic(g, 4, 4).holds:
            continue
        good = [c for c in colorings_with_sizes(8, (6, 1, 1), rng)
                if is_rs_robust_colored(g.with_colors(c), F + 1, F + 1).holds]
        if not good:
            continue
        for s1, s2, adv in stuck_pairs(g, F, F + 1):
            if len(adv) > F:
                continue
            for colors in good:
                if any(colors[v] for v in adv):
                    continue
                gc = g.with_colors(colors)
                sc_r = scenario(gc, s1, s2, adv, F, Scope.F_TOTAL, Protocol.RCPC)
                sc_w = scenario(g, s1, s2, adv, F, Scope.F_TOTAL, Protocol.WMSR)
                if simulate_outcome(sc_r).converged and not simulate_outcome(sc_w).converged:
                    return gc, s1, s2, adv
    raise RuntimeError("no F-total fixture found")


def search_flocal(rng: random.Random):
    F = 2
    n = 11
    for attempt in range(200000):
        g = random_graph(rng, n, rng.randint(20, 30))
        if not is_r_robust_classic(g, 3).holds or is_r_robust_classic(g, 5).holds:
            continue
        found = None
        for s1, s2, adv in stuck_pairs(g, F, F + 1):
            if adv and validate_adversary_placement(g, AdversaryModel(Scope.F_LOCAL, F, adv)):
                found = s1, s2, adv
                break
        if found is None:
            continue
        s1, s2, adv = found
        for colors in colorings_with_sizes(n, (6, 2, 3), rng):
            if len({colors[v] for v in adv}) > 1:
                continue
            gc = g.with_colors(colors)
            if not is_r_robust_colored(gc, 2 * F + 1).holds:
                continue
            sc_r = scenario(gc, s1, s2, adv, F, Scope.F_LOCAL, Protocol.RCPC)
            sc_w = scenario(g, s1, s2, adv, F, Scope.F_LOCAL, Protocol.WMSR)
            if simulate_outcome(sc_r).converged and not simulate_outcome(sc_w).converged:
                return gc, s1, s2, adv
    raise RuntimeError("no F-local fixture found")


def write_fixture(name: str, gc: ColoredGraph, s1, s2, adv, F: int, scope: Scope, cert: dict):
    d = gc.to_dict()
    d["certification"] = cert
    (DATA / f"{name}_graph.json").write_text(json.dumps(d, indent=1) + "\n")
    uniform = gc.with_colors([0] * gc.n)
    entries = []
    for label, graph, proto, expect in (
            ("wmsr-uniform", uniform, Protocol.WMSR, "diverges"),
            ("rcpc-colored", gc, Protocol.RCPC, "converges"),
            ("rcpc-uniform", uniform, Protocol.RCPC, "diverges"),
            ("wmsr-colored", gc, Protocol.WMSR, "diverges")):
        sc = scenario(graph, s1, s2, adv, F, scope, proto)
        sd = scenario_to_dict(sc)
        sd["graph"] = f"{name}_graph.json"
        if graph is uniform:
            sd["graph"] = graph.to_dict()
        entries.append({"name": f"{name}-{label}", "scenario": sd, "expect": expect})
    suite = {"name": f"{name}_suite", "scenarios": entries}
    (DATA / f"{name}_suite.json").write_text(json.dumps(suite, indent=1) + "\n")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    DATA.mkdir(parents=True, exist_ok=True)

    gc, s1, s2, adv = search_ftotal(rng)
    u = gc.with_colors([0] * gc.n)
    cert = {"uniform_rs_2_2": is_rs_robust_classic(u, 2, 2).holds,
            "uniform_rs_4_4": is_rs_robust_classic(u, 4, 4).holds,
            "colored_rs_4_4": is_rs_robust_colored(gc, 4, 4).holds,
            "class_sizes": sorted((gc.colors.count(c) for c in set(gc.colors)), reverse=True),
            "S1": sorted(s1), "S2": sorted(s2), "adversaries": sorted(adv)}
    write_fixture("ftotal", gc, s1, s2, adv, 3, Scope.F_TOTAL, cert)
    print("ftotal", gc, cert)

    gc, s1, s2, adv = search_flocal(rng)
    u = gc.with_colors([0] * gc.n)
    cert = {"uniform_r_3": is_r_robust_classic(u, 3).holds,
            "uniform_r_5": is_r_robust_classic(u, 5).holds,
            "colored_r_5": is_r_robust_colored(gc, 5).holds,
            "class_sizes": sorted((gc.colors.count(c) for c in set(gc.colors)), reverse=True),
            "S1": sorted(s1), "S2": sorted(s2), "adversaries": sorted(adv)}
    write_fixture("flocal", gc, s1, s2, adv, 2, Scope.F_LOCAL, cert)
    print("flocal", gc, cert)


if __name__ == "__main__":
    main()
