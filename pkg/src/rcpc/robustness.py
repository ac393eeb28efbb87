"""Exhaustive robustness certification for colored graphs.

Three colored notions are checked over every pair of nonempty disjoint node
sets:

* ``(r,s)``-robustness with coloring (``is_rs_robust_colored``),
* ``r``-robustness with coloring (``is_r_robust_colored``),
* mono-chromatic robustness (``is_mono_chromatic_robust``).

The classical (single color) notions are obtained by recoloring uniformly.
``classic_rs_robust_direct`` is a separate implementation of classical
(r,s)-robustness that shares no validity logic with the colored checker and
is used to cross-check the reduction.

Pairs are enumerated in a fixed order: a ternary counter over per-node
assignments {outside, S1, S2} with node 0 as the least significant digit,
keeping each unordered pair once (the lowest node of S1 ∪ S2 sits in S1).
The first violating pair in that order is the reported witness, so witnesses
are reproducible.
"""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from . import kernels
from .graph import ColoredGraph, recolor_uniform

MAX_EXHAUSTIVE_N = 16


class RobustnessError(ValueError):
    pass


class ValidityReason(enum.Enum):
    MONO_CHROMATIC_DEGREE = "MonoChromaticDegree"
    TWO_DISTINCT_COLORS = "TwoDistinctColors"
    THREE_DISTINCT_COLORS = "ThreeDistinctColors"
    R_DEGREE_ANY_COLOR = "RDegreeAnyColor"


@dataclass(frozen=True)
class Witness:
    s1: frozenset[int]
    s2: frozenset[int]
    valid1: frozenset[int]
    valid2: frozenset[int]

    def to_dict(self) -> dict:
        return {"S1": sorted(self.s1), "S2": sorted(self.s2),
                "valid1": sorted(self.valid1), "valid2": sorted(self.valid2)}


@dataclass(frozen=True)
class RobustnessVerdict:
    holds: bool
    witness: Witness | None = None
    definition: str = ""
    params: dict = field(default_factory=dict)
    certified: bool = True

    def __bool__(self) -> bool:
        return self.holds

    def to_dict(self) -> dict:
        d = {"definition": self.definition, "params": dict(self.params),
             "holds": self.holds, "certified": self.certified}
        if self.witness is not None:
            d["witness"] = self.witness.to_dict()
        return d


# -- per-node predicates -----------------------------------------------------

def _outside_neighbors(g: ColoredGraph, s: frozenset[int], v: int) -> frozenset[int]:
    return g.neighbors[v] - s


def is_r_valid(g: ColoredGraph, s, v: int, r: int) -> tuple[bool, ValidityReason | None]:
    """Whether ``v`` in ``s`` has ``r`` same-colored outside neighbors or two
    differently colored outside neighbors."""
    s = frozenset(s)
    if v not in s:
        raise RobustnessError(f"node {v} is not in the set")
    if r < 1:
        raise RobustnessError("r must be >= 1")
    counts: dict[int, int] = {}
    for u in _outside_neighbors(g, s, v):
        counts[g.colors[u]] = counts.get(g.colors[u], 0) + 1
    if any(c >= r for c in counts.values()):
        return True, ValidityReason.MONO_CHROMATIC_DEGREE
    if len(counts) >= 2:
        return True, ValidityReason.TWO_DISTINCT_COLORS
    return False, None


def valid_nodes(g: ColoredGraph, s, r: int) -> frozenset[int]:
    s = frozenset(s)
    return frozenset(v for v in s if is_r_valid(g, s, v, r)[0])


def qualifying_node_reason(g: ColoredGraph, s, v: int, r: int | None) -> ValidityReason | None:
    """Node test shared by r-robustness with coloring (``r`` given) and
    mono-chromatic robustness (``r=None``)."""
    out = _outside_neighbors(g, frozenset(s), v)
    if r is not None and len(out) >= r:
        return ValidityReason.R_DEGREE_ANY_COLOR
    if len({g.colors[u] for u in out}) >= 3:
        return ValidityReason.THREE_DISTINCT_COLORS
    return None


def rs_clauses(g: ColoredGraph, s1, s2, r: int, s: int) -> tuple[bool, bool, bool, bool]:
    """Evaluate the four (r,s)-with-coloring clauses for one pair, directly."""
    s1, s2 = frozenset(s1), frozenset(s2)
    x1, x2 = valid_nodes(g, s1, r), valid_nodes(g, s2, r)
    union = x1 | x2
    ncol = len({g.colors[v] for v in union})
    return (len(x1) == len(s1), len(x2) == len(s2),
            bool(union) and ncol == 1 and len(union) >= s,
            ncol >= 2)


# -- enumeration ---------------------------------------------------------------

def count_disjoint_pairs(n: int) -> int:
    return (3 ** n - 2 ** (n + 1) + 1) // 2


def enumerate_disjoint_pairs(n: int) -> Iterator[tuple[frozenset[int], frozenset[int]]]:
    """Every unordered pair of nonempty disjoint subsets of ``range(n)``,
    once each, in ternary-counter order."""
    if n < 2:
        raise RobustnessError("need at least two nodes")
    digits = [0] * n
    while True:
        i = 0
        while i < n and digits[i] == 2:
            digits[i] = 0
            i += 1
        if i == n:
            return
        digits[i] += 1
        s1 = [v for v in range(n) if digits[v] == 1]
        s2 = [v for v in range(n) if digits[v] == 2]
        if s1 and s2 and s1[0] < s2[0]:
            yield frozenset(s1), frozenset(s2)


def _bits_to_set(m: int) -> frozenset[int]:
    m = int(m)
    out = []
    v = 0
    while m:
        if m & 1:
            out.append(v)
        m >>= 1
        v += 1
    return frozenset(out)


def _dense_colors(g: ColoredGraph) -> tuple[np.ndarray, int]:
    ranks = {c: k for k, c in enumerate(sorted(set(g.colors)))}
    return np.array([ranks[c] for c in g.colors], dtype=np.int64), len(ranks)


def _require(g: ColoredGraph, sample: int | None) -> None:
    if g.n < 2:
        raise RobustnessError("robustness checks need at least two nodes")
    if sample is None and g.n > MAX_EXHAUSTIVE_N:
        raise RobustnessError(
            f"exhaustive check supports n <= {MAX_EXHAUSTIVE_N}; pass sample=k for a "
            "randomized (non-certifying) check")


def _random_pairs(n: int, k: int, seed: int) -> Iterator[tuple[frozenset[int], frozenset[int]]]:
    rng = random.Random(seed)
    produced = 0
    while produced < k:
        a = [rng.randrange(3) for _ in range(n)]
        s1 = frozenset(v for v in range(n) if a[v] == 1)
        s2 = frozenset(v for v in range(n) if a[v] == 2)
        if s1 and s2:
            produced += 1
            yield s1, s2


# -- Definition-level checkers --------------------------------------------------

def is_rs_robust_colored(g: ColoredGraph, r: int, s: int, *, sample: int | None = None,
                         seed: int = 0, fewest_valid: bool = False) -> RobustnessVerdict:
    """(r,s)-robustness with coloring.

    A pair passes if S1 is entirely r-valid, or S2 is, or the r-valid nodes
    of both sets are one color and number at least ``s``, or they span two
    colors.  ``r`` and ``s`` may be 1 (singleton unions count as
    mono-chromatic).  With ``sample=k`` only ``k`` random pairs are tried and
    the verdict is marked uncertified.

    The witness is the first violating pair in ternary order, or with
    ``fewest_valid`` the violating pair with the fewest r-valid nodes
    (which scans every pair unless one with none turns up).
    """
    if r < 1 or s < 1:
        raise RobustnessError("r and s must be >= 1")
    _require(g, sample)
    params = {"r": r, "s": s}
    if sample is not None:
        for s1, s2 in _random_pairs(g.n, sample, seed):
            if not any(rs_clauses(g, s1, s2, r, s)):
                return RobustnessVerdict(False, Witness(s1, s2, valid_nodes(g, s1, r),
                                                        valid_nodes(g, s2, r)),
                                         "rs-colored", params, certified=True)
        return RobustnessVerdict(True, None, "rs-colored", params, certified=False)
    colors, ncol = _dense_colors(g)
    full, cnt, cmask = kernels.rs_subset_tables(g.adjacency_bits, colors, g.n, ncol, r)
    scan = kernels.scan_rs_fewest if fewest_valid else kernels.scan_rs
    m1, m2 = scan(g.n, full, cnt, cmask, s)
    if m1 < 0:
        return RobustnessVerdict(True, None, "rs-colored", params)
    s1, s2 = _bits_to_set(m1), _bits_to_set(m2)
    return RobustnessVerdict(False, Witness(s1, s2, valid_nodes(g, s1, r), valid_nodes(g, s2, r)),
                             "rs-colored", params)


def is_rs_robust_classic(g: ColoredGraph, r: int, s: int, **kw) -> RobustnessVerdict:
    """Classical (r,s)-robustness, by uniform recoloring."""
    v = is_rs_robust_colored(recolor_uniform(g), r, s, **kw)
    return RobustnessVerdict(v.holds, v.witness, "rs-classic", v.params, v.certified)


def classic_rs_robust_direct(g: ColoredGraph, r: int, s: int) -> RobustnessVerdict:
    """Classical (r,s)-robustness computed from outside-degree counts only.

    Independent of the colored checker (different kernel, different
    enumeration); the witness, if any, is the first violation in its own
    enumeration order.
    """
    if r < 1 or s < 1:
        raise RobustnessError("r and s must be >= 1")
    _require(g, None)
    m1, m2 = kernels.classic_rs_direct(g.adjacency_bits, g.n, r, s)
    params = {"r": r, "s": s}
    if m1 < 0:
        return RobustnessVerdict(True, None, "rs-classic-direct", params)
    s1, s2 = _bits_to_set(m1), _bits_to_set(m2)
    reach = lambda S: frozenset(v for v in S if len(g.neighbors[v] - S) >= r)  # noqa: E731
    return RobustnessVerdict(False, Witness(s1, s2, reach(s1), reach(s2)),
                             "rs-classic-direct", params)


def _qualify_check(g: ColoredGraph, r: int | None, name: str, params: dict,
                   sample: int | None, seed: int) -> RobustnessVerdict:
    _require(g, sample)
    if sample is not None:
        for s1, s2 in _random_pairs(g.n, sample, seed):
            q1 = frozenset(v for v in s1 if qualifying_node_reason(g, s1, v, r))
            q2 = frozenset(v for v in s2 if qualifying_node_reason(g, s2, v, r))
            if not q1 and not q2:
                return RobustnessVerdict(False, Witness(s1, s2, q1, q2), name, params)
        return RobustnessVerdict(True, None, name, params, certified=False)
    colors, ncol = _dense_colors(g)
    rr = r if r is not None else g.n + 1
    qual = kernels.qualify_table(g.adjacency_bits, colors, g.n, ncol, rr)
    m1, m2 = kernels.scan_any(g.n, qual)
    if m1 < 0:
        return RobustnessVerdict(True, None, name, params)
    return RobustnessVerdict(False, Witness(_bits_to_set(m1), _bits_to_set(m2),
                                            frozenset(), frozenset()), name, params)


def is_r_robust_colored(g: ColoredGraph, r: int, *, sample: int | None = None,
                        seed: int = 0) -> RobustnessVerdict:
    """r-robustness with coloring: in every pair, some node of one side has
    at least ``r`` outside neighbors (any colors) or three distinct outside
    neighbor colors."""
    if r < 1:
        raise RobustnessError("r must be >= 1")
    return _qualify_check(g, r, "r-colored", {"r": r}, sample, seed)


def is_r_robust_classic(g: ColoredGraph, r: int, **kw) -> RobustnessVerdict:
    v = is_r_robust_colored(recolor_uniform(g), r, **kw)
    return RobustnessVerdict(v.holds, v.witness, "r-classic", v.params, v.certified)


def is_mono_chromatic_robust(g: ColoredGraph, *, sample: int | None = None,
                             seed: int = 0) -> RobustnessVerdict:
    """Every pair has a node, on one side, seeing three distinct colors
    outside its own set."""
    return _qualify_check(g, None, "mono-chromatic", {}, sample, seed)


def max_rs_frontier(g: ColoredGraph, r_max: int, s_max: int) -> list[tuple[int, int]]:
    """Maximal (r, s) <= (r_max, s_max) for which the colored property holds.

    Relies on monotonicity in both parameters: for each r the largest
    passing s is found by bisection, and dominated points are dropped.
    """
    if r_max < 1 or s_max < 1:
        raise RobustnessError("bounds must be >= 1")
    best: list[int] = []
    for r in range(1, r_max + 1):
        if not is_rs_robust_colored(g, r, 1):
            break
        lo, hi = 1, s_max
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if is_rs_robust_colored(g, r, mid):
                lo = mid
            else:
                hi = mid - 1
        best.append(lo)
    frontier = []
    for k, s in enumerate(best):
        if k + 1 == len(best) or best[k + 1] < s:
            frontier.append((k + 1, s))
    return frontier


def dominated(point: tuple[int, int], frontier: list[tuple[int, int]]) -> bool:
    """True if some frontier point is >= ``point`` componentwise."""
    return any(r >= point[0] and s >= point[1] for r, s in frontier)


__all__ = [
    "MAX_EXHAUSTIVE_N", "RobustnessError", "RobustnessVerdict", "ValidityReason", "Witness",
    "classic_rs_robust_direct", "count_disjoint_pairs", "dominated",
    "enumerate_disjoint_pairs", "is_mono_chromatic_robust", "is_r_robust_classic",
    "is_r_robust_colored", "is_r_valid", "is_rs_robust_classic", "is_rs_robust_colored",
    "max_rs_frontier", "qualifying_node_reason", "rs_clauses", "valid_nodes",
]
