"""Robustness-preserving graph growth and colored-graph constructions."""
from __future__ import annotations

import enum
import random
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable

from .graph import ColoredGraph, build_graph, complete_graph
from .robustness import (RobustnessVerdict, is_mono_chromatic_robust, is_r_robust_classic,
                         is_rs_robust_colored)


class ConstructionError(ValueError):
    pass


class GrowthVariant(enum.Enum):
    MONO_DEGREE = "mono-degree"        # >= r+s-1 neighbors of one color
    MAX_RS_PLUS_ONE = "max-rs-plus-one"  # >= max(r,s) of one color + one of another
    THREE_COLORS = "three-colors"      # neighbors span >= 3 colors


@dataclass(frozen=True)
class GrowthRule:
    variant: GrowthVariant
    r: int = 1
    s: int = 1

    def to_dict(self) -> dict:
        return {"variant": self.variant.value, "r": self.r, "s": self.s}


@dataclass
class ConstructionReport:
    graph: ColoredGraph
    rule: str
    neighbors: list[int] = field(default_factory=list)
    verdicts: list[RobustnessVerdict] = field(default_factory=list)

    @property
    def verified(self) -> bool:
        return all(v.holds for v in self.verdicts)

    def to_dict(self) -> dict:
        return {"rule": self.rule, "neighbors": self.neighbors,
                "n": self.graph.n, "colors_used": len(self.graph.used_colors),
                "verified": self.verified,
                "verdicts": [v.to_dict() for v in self.verdicts]}


def _neighbor_colors(g: ColoredGraph, neighbors) -> Counter:
    return Counter(g.colors[v] for v in neighbors)


def growth_rule_failure(g: ColoredGraph, rule: GrowthRule, neighbors) -> str | None:
    """Why ``neighbors`` does not satisfy ``rule`` (None if it does)."""
    counts = _neighbor_colors(g, neighbors)
    if rule.variant is GrowthVariant.MONO_DEGREE:
        need = rule.r + rule.s - 1
        if not counts or max(counts.values()) < need:
            return f"mono-degree clause needs {need} neighbors of one color"
    elif rule.variant is GrowthVariant.MAX_RS_PLUS_ONE:
        need = max(rule.r, rule.s)
        if len(counts) < 2 or max(counts.values()) < need:
            return (f"max-rs-plus-one clause needs {need} neighbors of one color "
                    "and one neighbor of another color")
    elif len(counts) < 3:
        return "three-colors clause needs neighbors of 3 distinct colors"
    return None


def _attach(g: ColoredGraph, neighbors: list[int], new_color: int) -> ColoredGraph:
    u = g.n
    return build_graph(g.n + 1, list(g.edges) + [(v, u) for v in neighbors],
                       list(g.colors) + [new_color],
                       num_colors=max(g.num_colors, new_color + 1))


def _check_neighbors(g: ColoredGraph, neighbors: Iterable[int]) -> list[int]:
    nb = sorted(set(int(v) for v in neighbors))
    bad = [v for v in nb if not 0 <= v < g.n]
    if bad:
        raise ConstructionError(f"neighbors {bad} not in graph")
    return nb


def attach_node(g: ColoredGraph, rule: GrowthRule, neighbors, new_color: int) -> ColoredGraph:
    """Add one node adjacent to ``neighbors`` after checking the growth rule.

    The three rules each keep an (r,s)-robust-with-coloring graph robust at
    the same (r,s).
    """
    nb = _check_neighbors(g, neighbors)
    why = growth_rule_failure(g, rule, nb)
    if why:
        raise ConstructionError(why)
    return _attach(g, nb, new_color)


def attach_node_r_robust(g: ColoredGraph, r: int, neighbors, new_color: int) -> ColoredGraph:
    """Growth for r-robustness with coloring: at least ``r`` neighbors, or
    neighbors of three distinct colors."""
    nb = _check_neighbors(g, neighbors)
    if len(nb) < r and len(_neighbor_colors(g, nb)) < 3:
        raise ConstructionError(f"need {r} neighbors or neighbors of 3 distinct colors")
    return _attach(g, nb, new_color)


def grow(g: ColoredGraph, rule: GrowthRule, neighbors, new_color: int) -> ConstructionReport:
    """``attach_node`` plus a fresh (r,s) certificate of the result."""
    g2 = attach_node(g, rule, neighbors, new_color)
    return ConstructionReport(g2, rule.variant.value, sorted(set(neighbors)),
                              [is_rs_robust_colored(g2, rule.r, rule.s)])


def random_rule_neighbors(g: ColoredGraph, rule: GrowthRule, rng: random.Random) -> list[int] | None:
    """Pick a random neighbor set satisfying ``rule``, or None if ``g`` has
    no such set."""
    by_color: dict[int, list[int]] = {}
    for v in range(g.n):
        by_color.setdefault(g.colors[v], []).append(v)
    colors = list(by_color)
    if rule.variant is GrowthVariant.MONO_DEGREE:
        need = rule.r + rule.s - 1
        ok = [c for c in colors if len(by_color[c]) >= need]
        if not ok:
            return None
        c = rng.choice(ok)
        k = rng.randint(need, len(by_color[c]))
        return sorted(rng.sample(by_color[c], k))
    if rule.variant is GrowthVariant.MAX_RS_PLUS_ONE:
        need = max(rule.r, rule.s)
        ok = [c for c in colors if len(by_color[c]) >= need]
        if not ok or len(colors) < 2:
            return None
        c = rng.choice(ok)
        other = rng.choice([d for d in colors if d != c])
        return sorted(rng.sample(by_color[c], need) + [rng.choice(by_color[other])])
    if len(colors) < 3:
        return None
    return sorted(rng.choice(by_color[c]) for c in rng.sample(colors, 3))


def build_mono_chromatic_robust(n: int, seed: int = 0, verify: bool = True) -> ConstructionReport:
    """Rainbow K5, then each new node joined to three existing nodes of
    distinct colors and given one of the five colors at random."""
    if n < 5:
        raise ConstructionError("a mono-chromatic robust graph needs at least five nodes")
    rng = random.Random(seed)
    g = complete_graph(5, [0, 1, 2, 3, 4])
    while g.n < n:
        by_color: dict[int, list[int]] = {}
        for v in range(g.n):
            by_color.setdefault(g.colors[v], []).append(v)
        picks = [rng.choice(by_color[c]) for c in rng.sample(sorted(by_color), 3)]
        g = _attach(g, sorted(picks), rng.randrange(5))
    verdicts = [is_mono_chromatic_robust(g)] if verify else []
    return ConstructionReport(g, "k5-chain", [], verdicts)


def build_f_elemental(F: int, verify: bool = True, hub_colors: int = 5,
                      non_hub_edges: Iterable[tuple[int, int]] | None = None) -> ConstructionReport:
    """F-elemental candidate on 4F+1 nodes: hubs 0..2F-1 are adjacent to
    every node; hubs 0..4 get colors 0..4, every other node color 0.

    By default the non-hub nodes are pairwise adjacent too, giving the
    complete graph.  ``non_hub_edges`` replaces that with a sparser
    subgraph on nodes 2F..4F; the verdicts then say whether the result is
    still (2F+1)-robust and mono-chromatic robust.  ``hub_colors`` < 5
    recolors the hubs with fewer colors (used to show the five-color bound
    is tight).
    """
    if F < 3:
        raise ConstructionError("F-elemental construction needs F >= 3")
    n = 4 * F + 1
    hubs = range(2 * F)
    colors = [0] * n
    for h in range(5):
        colors[h] = h % hub_colors
    if non_hub_edges is None:
        g = complete_graph(n, colors)
    else:
        rest = [tuple(e) for e in non_hub_edges]
        if any(not (2 * F <= min(e) and max(e) < n) for e in rest):
            raise ConstructionError(f"non-hub edges must join nodes {2 * F}..{n - 1}")
        spokes = [(h, v) for h in hubs for v in range(h + 1, n)]
        g = build_graph(n, spokes + rest, colors)
    verdicts = [is_mono_chromatic_robust(g), is_r_robust_classic(g, 2 * F + 1)] if verify else []
    return ConstructionReport(g, "f-elemental", [], verdicts)


def _order(g: ColoredGraph, order: str) -> list[int]:
    if order == "degree":
        return sorted(range(g.n), key=lambda v: (-g.degree(v), v))
    if order == "bfs":
        seen, out = set(), []
        for root in range(g.n):
            if root in seen:
                continue
            seen.add(root)
            q = deque([root])
            while q:
                v = q.popleft()
                out.append(v)
                for u in sorted(g.neighbors[v]):
                    if u not in seen:
                        seen.add(u)
                        q.append(u)
        return out
    raise ValueError(f"unknown order {order!r}")


def greedy_proper_coloring(g: ColoredGraph, order: str = "degree") -> ColoredGraph:
    """Greedy coloring: visit nodes in ``order`` ('degree': descending degree,
    ties by id; 'bfs') and give each the smallest color unused by its
    already-colored neighbors."""
    colors = [-1] * g.n
    for v in _order(g, order):
        taken = {colors[u] for u in g.neighbors[v]}
        c = 0
        while c in taken:
            c += 1
        colors[v] = c
    return g.with_colors(colors)


def is_proper_coloring(g: ColoredGraph) -> bool:
    return all(g.colors[u] != g.colors[v] for u, v in g.edges)


def has_triangle_in_neighborhood(g: ColoredGraph, v: int) -> bool:
    nb = sorted(g.neighbors[v])
    for a_i, a in enumerate(nb):
        common = g.neighbors[a] & g.neighbors[v]
        for b in nb[a_i + 1:]:
            if b in common and common & g.neighbors[b]:
                return True
    return False


def triangle_rich_and_3_robust(g: ColoredGraph) -> bool:
    """Every vertex has three pairwise adjacent neighbors, and the graph
    (one color) is 3-robust."""
    if g.n < 2 or not all(has_triangle_in_neighborhood(g, v) for v in range(g.n)):
        return False
    return is_r_robust_classic(g, 3).holds


__all__ = [
    "ConstructionError", "ConstructionReport", "GrowthRule", "GrowthVariant",
    "attach_node", "attach_node_r_robust", "build_f_elemental", "build_mono_chromatic_robust",
    "triangle_rich_and_3_robust", "greedy_proper_coloring", "grow", "growth_rule_failure",
    "has_triangle_in_neighborhood", "is_proper_coloring", "random_rule_neighbors",
]
