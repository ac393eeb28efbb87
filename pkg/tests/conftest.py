import random

import networkx as nx
import pytest
from hypothesis import strategies as st

from rcpc.graph import build_graph


def from_nx(h, colors=None):
    mapping = {v: k for k, v in enumerate(sorted(h.nodes))}
    edges = [(mapping[u], mapping[v]) for u, v in h.edges]
    n = h.number_of_nodes()
    return build_graph(n, edges, colors if colors is not None else [0] * n)


def random_graph(rng: random.Random, n: int, p: float, ncolors: int = 1):
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return build_graph(n, edges, [rng.randrange(ncolors) for _ in range(n)])


@st.composite
def small_graphs(draw, min_n=2, max_n=7, max_colors=4):
    n = draw(st.integers(min_n, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True))
    k = draw(st.integers(1, max_colors))
    colors = draw(st.lists(st.integers(0, k - 1), min_size=n, max_size=n))
    return build_graph(n, edges, colors)


@pytest.fixture(scope="session")
def atlas_graphs():
    """All graphs on 2..6 nodes up to isomorphism."""
    return [from_nx(h) for h in nx.graph_atlas_g() if 2 <= h.number_of_nodes() <= 6]


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line for an acceptance criterion; the lines are
    printed together at the end of the run."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def record(number: int, ok: bool, detail: str) -> bool:
        lines.append((number, f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"))
        return ok
    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
