import random
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from conftest import random_graph, small_graphs
from rcpc.graph import build_graph, complete_graph, cycle_graph, disjoint_union, recolor_uniform
from rcpc.robustness import (RobustnessError, ValidityReason, classic_rs_robust_direct,
                             count_disjoint_pairs, dominated, enumerate_disjoint_pairs,
                             is_mono_chromatic_robust, is_r_robust_classic, is_r_robust_colored,
                             is_r_valid, is_rs_robust_classic, is_rs_robust_colored,
                             max_rs_frontier, rs_clauses)

K5_RAINBOW = complete_graph(5, [0, 1, 2, 3, 4])
P3 = build_graph(3, [(0, 1), (1, 2)], [0, 0, 0])
TWO_K3 = disjoint_union(complete_graph(3), complete_graph(3, [1, 2, 1]))


def test_r_valid_examples():
    assert is_r_valid(K5_RAINBOW, {0}, 0, 4) == (True, ValidityReason.TWO_DISTINCT_COLORS)
    assert is_r_valid(P3, {1}, 1, 2) == (True, ValidityReason.MONO_CHROMATIC_DEGREE)
    assert is_r_valid(P3, {1}, 1, 3) == (False, None)
    with pytest.raises(RobustnessError):
        is_r_valid(P3, {0}, 1, 1)


@pytest.mark.parametrize("n", range(2, 8))
def test_pair_enumeration_count(n):
    pairs = list(enumerate_disjoint_pairs(n))
    assert len(pairs) == count_disjoint_pairs(n)
    assert {frozenset(p) for p in pairs} == oracles.all_pairs_unordered(n)
    assert [tuple(map(set, p)) for p in pairs] == list(oracles.ternary_pairs(n))


def test_pair_enumeration_small():
    assert list(enumerate_disjoint_pairs(2)) == [({0}, {1})]
    assert count_disjoint_pairs(3) == 6 and count_disjoint_pairs(4) == 25


def test_rs_colored_examples():
    assert is_rs_robust_colored(complete_graph(3), 2, 2).holds
    v = is_rs_robust_colored(TWO_K3, 1, 1)
    assert not v.holds
    assert {v.witness.s1, v.witness.s2} == {frozenset({0, 1, 2}), frozenset({3, 4, 5})}
    assert is_rs_robust_colored(K5_RAINBOW, 4, 4).holds


def test_rs_classic_examples():
    assert is_rs_robust_classic(complete_graph(3), 2, 2).holds
    assert not is_rs_robust_classic(cycle_graph(6), 2, 2).holds
    assert is_rs_robust_classic(complete_graph(5), 3, 2).holds
    assert not classic_rs_robust_direct(cycle_graph(6), 2, 2).holds


def test_r_colored_examples():
    assert is_r_robust_colored(K5_RAINBOW, 5).holds
    assert not is_r_robust_colored(cycle_graph(6), 3).holds
    assert is_r_robust_classic(cycle_graph(6), 1).holds
    assert not is_r_robust_classic(cycle_graph(6), 2).holds
    assert is_r_robust_colored(complete_graph(3), 2).holds


def test_mono_chromatic_examples():
    assert is_mono_chromatic_robust(K5_RAINBOW).holds
    assert not is_mono_chromatic_robust(complete_graph(6, [0, 1, 2, 3, 0, 1])).holds
    assert not is_mono_chromatic_robust(disjoint_union(K5_RAINBOW, K5_RAINBOW)).holds


def test_errors():
    one = build_graph(1, [], [0])
    for call in (lambda: is_rs_robust_colored(one, 1, 1), lambda: is_mono_chromatic_robust(one),
                 lambda: is_r_robust_colored(one, 1), lambda: is_rs_robust_colored(P3, 0, 1)):
        with pytest.raises(RobustnessError):
            call()
    with pytest.raises(RobustnessError, match="sample"):
        is_rs_robust_colored(cycle_graph(17), 1, 1)


def test_sampling_mode_is_labelled():
    big = complete_graph(20, [v % 3 for v in range(20)])
    v = is_rs_robust_colored(big, 2, 2, sample=200, seed=1)
    assert v.holds and not v.certified
    ring = cycle_graph(20)
    bad = is_rs_robust_colored(ring, 3, 3, sample=200, seed=1)
    assert not bad.holds and not any(rs_clauses(ring, bad.witness.s1, bad.witness.s2, 3, 3))
    assert not is_mono_chromatic_robust(ring, sample=50).holds


def _random_case(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 7)
    return random_graph(rng, n, rng.random(), rng.randint(1, 4)), rng.randint(1, 4), rng.randint(1, 4)


@pytest.mark.parametrize("seed", range(150))
def test_checkers_match_bruteforce(seed):
    g, r, s = _random_case(seed)
    nb = oracles.nbrs_of(g)
    got = is_rs_robust_colored(g, r, s)
    want = oracles.rs_colored(nb, g.colors, r, s)
    assert got.holds == (want is None)
    if want is not None:
        assert (set(got.witness.s1), set(got.witness.s2)) == want
    assert is_r_robust_colored(g, r).holds == (oracles.r_colored(nb, g.colors, r) is None)
    assert is_mono_chromatic_robust(g).holds == (oracles.mono_chromatic(nb, g.colors) is None)
    assert classic_rs_robust_direct(g, r, s).holds == (oracles.rs_classic(nb, r, s) is None)


def test_singleton_convention_harmless(atlas_graphs):
    # with r, s >= 2 treating singletons as mono-chromatic never changes a verdict
    rng = random.Random(3)
    for g in atlas_graphs:
        if g.n > 5:
            continue
        colors = [rng.randrange(3) for _ in range(g.n)]
        nb = oracles.nbrs_of(g)
        for r, s in product(range(2, 4), repeat=2):
            a = oracles.rs_colored(nb, colors, r, s, singleton_mono=True)
            b = oracles.rs_colored(nb, colors, r, s, singleton_mono=False)
            assert (a is None) == (b is None)


@settings(max_examples=80, deadline=None)
@given(small_graphs(), st.integers(1, 4), st.integers(1, 4))
def test_witness_soundness(g, r, s):
    v = is_rs_robust_colored(g, r, s)
    if not v.holds:
        w = v.witness
        assert w.s1 and w.s2 and not (w.s1 & w.s2)
        assert w.valid1 <= w.s1 and w.valid2 <= w.s2
        assert not any(rs_clauses(g, w.s1, w.s2, r, s))
    else:
        assert v.witness is None


@settings(max_examples=60, deadline=None)
@given(small_graphs(), st.integers(1, 4), st.integers(1, 4))
def test_parameter_monotonicity(g, r, s):
    if is_rs_robust_colored(g, r, s).holds:
        for r2 in range(1, r + 1):
            for s2 in range(1, s + 1):
                assert is_rs_robust_colored(g, r2, s2).holds


@settings(max_examples=60, deadline=None)
@given(small_graphs(), st.integers(1, 4), st.integers(1, 4), st.data())
def test_edge_monotonicity(g, r, s, data):
    missing = [(i, j) for i in range(g.n) for j in range(i + 1, g.n) if (i, j) not in g.edges]
    if not missing:
        return
    h = g.with_edges([data.draw(st.sampled_from(missing))])
    if is_rs_robust_colored(g, r, s).holds:
        assert is_rs_robust_colored(h, r, s).holds
    if is_r_robust_colored(g, r).holds:
        assert is_r_robust_colored(h, r).holds
    if is_mono_chromatic_robust(g).holds:
        assert is_mono_chromatic_robust(h).holds


def test_classic_reduction_exhaustive(atlas_graphs):
    for g in atlas_graphs:
        for r, s in product(range(1, 4), repeat=2):
            assert (is_rs_robust_classic(g, r, s).holds
                    == classic_rs_robust_direct(g, r, s).holds), (g, r, s)


def test_coloring_dominance_exhaustive(atlas_graphs):
    rng = random.Random(5)
    for g in atlas_graphs:
        if g.n > 5:
            continue
        for r, s in product(range(1, 4), repeat=2):
            if not is_rs_robust_classic(g, r, s).holds:
                continue
            for colors in product(range(3), repeat=g.n):
                if rng.random() < 0.2:
                    assert is_rs_robust_colored(g.with_colors(colors), r, s).holds


def test_improvement_needs_22_robust(atlas_graphs):
    # a graph that is not (2,2)-robust stays below (2,2) under every coloring
    checked = 0
    for g in atlas_graphs:
        if is_rs_robust_classic(g, 2, 2).holds:
            continue
        uniform = max_rs_frontier(g, 4, 4)
        for colors in product(range(3), repeat=g.n):
            if g.n == 6 and sum(colors) % 5:
                continue  # thin the 729 colorings of six-node graphs
            front = max_rs_frontier(g.with_colors(colors), 4, 4)
            assert all(r < 2 or s < 2 for r, s in front)
            assert all(dominated(p, front) for p in uniform)
            checked += 1
    assert checked > 1000


@settings(max_examples=100, deadline=None)
@given(small_graphs(max_colors=4))
def test_four_colors_never_mono_chromatic_robust(g):
    assert not is_mono_chromatic_robust(g).holds


def test_frontier():
    assert max_rs_frontier(K5_RAINBOW, 4, 4) == [(4, 4)]
    assert dominated((4, 4), max_rs_frontier(K5_RAINBOW, 6, 6))
    assert max_rs_frontier(TWO_K3, 4, 4) == []
    assert max_rs_frontier(complete_graph(5), 6, 6) == [(3, 6)]


@settings(max_examples=40, deadline=None)
@given(small_graphs(max_n=8))
def test_frontier_dominance(g):
    colored = max_rs_frontier(g, 5, 5)
    for p in max_rs_frontier(recolor_uniform(g), 5, 5):
        assert dominated(p, colored)
    for a in colored:
        for b in colored:
            assert a == b or not (a[0] <= b[0] and a[1] <= b[1])
