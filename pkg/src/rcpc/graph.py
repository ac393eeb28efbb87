"""Colored undirected graphs: the substrate for the robustness checkers,
the consensus simulator and the constructors.

Nodes are dense integers ``0..n-1``; colors are opaque small integers
``0..num_colors-1``.  Graphs are immutable; every "modification" returns a
new instance.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class GraphError(ValueError):
    """Raised when a graph violates a structural invariant."""


class GraphFormatError(GraphError):
    """Raised when a graph file cannot be parsed."""


@dataclass(frozen=True)
class ColoredGraph:
    n: int
    edges: frozenset[tuple[int, int]]
    colors: tuple[int, ...]
    num_colors: int
    meta: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    @cached_property
    def neighbors(self) -> tuple[frozenset[int], ...]:
        adj: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return tuple(frozenset(a) for a in adj)

    @cached_property
    def adjacency_bits(self) -> np.ndarray:
        """Neighbor sets as int64 bitmasks (bit j of entry i set iff i~j)."""
        bits = np.zeros(self.n, dtype=np.int64)
        for u, v in self.edges:
            bits[u] |= np.int64(1) << v
            bits[v] |= np.int64(1) << u
        return bits

    @cached_property
    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.int64)
        for u, v in self.edges:
            a[u, v] = a[v, u] = 1
        return a

    @property
    def color_array(self) -> np.ndarray:
        return np.asarray(self.colors, dtype=np.int64)

    @property
    def used_colors(self) -> frozenset[int]:
        return frozenset(self.colors)

    def degree(self, v: int) -> int:
        return len(self.neighbors[v])

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self.neighbors), default=0)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def with_colors(self, colors: Sequence[int], num_colors: int | None = None) -> "ColoredGraph":
        return build_graph(self.n, self.edges, colors, num_colors=num_colors)

    def with_edges(self, extra: Iterable[tuple[int, int]]) -> "ColoredGraph":
        return build_graph(self.n, list(self.edges) + list(extra), self.colors,
                           num_colors=self.num_colors)

    def to_dict(self) -> dict:
        d = {"n": self.n, "colors": list(self.colors),
             "edges": [list(e) for e in self.sorted_edges()]}
        if self.num_colors != (max(self.colors) + 1):
            d["num_colors"] = self.num_colors
        return d

    def __repr__(self) -> str:
        return (f"ColoredGraph(n={self.n}, m={len(self.edges)}, "
                f"colors={list(self.colors)})")


def build_graph(n: int, edges: Iterable[Sequence[int]], coloring: Sequence[int],
                num_colors: int | None = None, meta: dict | None = None) -> ColoredGraph:
    """Validate and normalize a colored graph.

    Edges may be given in either orientation and may repeat; each unordered
    pair is stored once with the smaller endpoint first.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise GraphError(f"node count must be a positive integer, got {n!r}")
    n = int(n)
    colors = tuple(int(c) for c in coloring)
    if len(colors) != n:
        raise GraphError(f"coloring has length {len(colors)}, expected {n}")
    if any(c < 0 for c in colors):
        raise GraphError("colors must be non-negative integers")
    declared = max(colors) + 1
    if num_colors is not None:
        if num_colors < declared:
            raise GraphError(f"num_colors={num_colors} but color {declared - 1} is used")
        declared = int(num_colors)
    norm: set[tuple[int, int]] = set()
    for e in edges:
        if len(e) != 2:
            raise GraphError(f"edge {e!r} is not a pair")
        u, v = int(e[0]), int(e[1])
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge ({u},{v}) has an endpoint outside [0,{n})")
        if u == v:
            raise GraphError(f"self-loop at node {u}")
        norm.add((u, v) if u < v else (v, u))
    return ColoredGraph(n, frozenset(norm), colors, declared, dict(meta or {}))


def complete_graph(n: int, colors: Sequence[int] | None = None) -> ColoredGraph:
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
    return build_graph(n, edges, colors if colors is not None else [0] * n)


def cycle_graph(n: int, colors: Sequence[int] | None = None) -> ColoredGraph:
    edges = [(i, (i + 1) % n) for i in range(n)]
    return build_graph(n, edges, colors if colors is not None else [0] * n)


def disjoint_union(a: ColoredGraph, b: ColoredGraph) -> ColoredGraph:
    edges = list(a.edges) + [(u + a.n, v + a.n) for u, v in b.edges]
    return build_graph(a.n + b.n, edges, a.colors + b.colors)


def _check_node(g: ColoredGraph, v: int) -> None:
    if not (0 <= v < g.n):
        raise GraphError(f"node {v} not in graph with {g.n} nodes")


def closed_neighborhood(g: ColoredGraph, v: int) -> frozenset[int]:
    _check_node(g, v)
    return g.neighbors[v] | {v}


def is_mono_chromatic(g: ColoredGraph, s: Iterable[int]) -> bool:
    """True iff every node of ``s`` has the same color.

    Singletons count as mono-chromatic.
    """
    s = list(s)
    if not s:
        raise GraphError("mono-chromatic test needs a nonempty set")
    for v in s:
        _check_node(g, v)
    return len({g.colors[v] for v in s}) == 1


def color_classes(g: ColoredGraph, s: Iterable[int]) -> dict[int, frozenset[int]]:
    """Partition ``s`` by color; keys are colors, empty classes omitted."""
    groups: dict[int, set[int]] = {}
    for v in s:
        groups.setdefault(g.colors[v], set()).add(v)
    return {c: frozenset(m) for c, m in sorted(groups.items())}


def recolor_uniform(g: ColoredGraph) -> ColoredGraph:
    """Same topology, every node color 0."""
    return ColoredGraph(g.n, g.edges, (0,) * g.n, 1, dict(g.meta))


def _parse_graph_dict(d: dict, source: str = "<dict>") -> ColoredGraph:
    if not isinstance(d, dict):
        raise GraphFormatError(f"{source}: top level must be an object")
    for key in ("n", "colors", "edges"):
        if key not in d:
            raise GraphFormatError(f"{source}: missing field '{key}'")
    n = d["n"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise GraphFormatError(f"{source}: field 'n' must be an integer")
    colors = d["colors"]
    if not isinstance(colors, list) or not all(isinstance(c, int) for c in colors):
        raise GraphFormatError(f"{source}: field 'colors' must be a list of integers")
    edges = d["edges"]
    if not isinstance(edges, list):
        raise GraphFormatError(f"{source}: field 'edges' must be a list")
    for k, e in enumerate(edges):
        if (not isinstance(e, list) or len(e) != 2
                or not all(isinstance(x, int) for x in e)):
            raise GraphFormatError(f"{source}: edges[{k}] must be a pair of integers, got {e!r}")
    num_colors = d.get("num_colors")
    meta = {k: v for k, v in d.items() if k not in ("n", "colors", "edges", "num_colors")}
    try:
        return build_graph(n, edges, colors, num_colors=num_colors, meta=meta)
    except GraphError as exc:
        raise GraphFormatError(f"{source}: {exc}") from None


def graph_from_dict(d: dict) -> ColoredGraph:
    return _parse_graph_dict(d)


def load_graph(path: str | Path) -> ColoredGraph:
    path = Path(path)
    try:
        d = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return _parse_graph_dict(d, str(path))


def save_graph(g: ColoredGraph, path: str | Path, extra: dict | None = None) -> None:
    d = g.to_dict()
    if extra:
        d.update(extra)
    Path(path).write_text(json.dumps(d, indent=1) + "\n")
