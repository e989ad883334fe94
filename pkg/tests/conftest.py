import sys
from pathlib import Path

import hypothesis
import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from densekit.graph import Digraph, Graph, Hypergraph  # noqa: E402

hypothesis.settings.register_profile("default", max_examples=40, deadline=None)
hypothesis.settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def random_graph(rng, n, p=0.4, weighted=True, connected=False):
    while True:
        src, dst = np.triu_indices(n, 1)
        keep = rng.random(src.size) < p
        w = rng.uniform(0.5, 2.0, keep.sum()) if weighted else np.ones(keep.sum())
        g = Graph(n, src[keep], dst[keep], w)
        if not connected or (g.m and g.subgraph_components().max() == 0):
            return g


def random_digraph(rng, n, p=0.3):
    tail, head = np.nonzero((rng.random((n, n)) < p) & ~np.eye(n, dtype=bool))
    return Digraph(n, tail, head, rng.uniform(0.5, 2.0, tail.size))


def random_hypergraph(rng, n, m, ranks=(2, 5), weighted=True):
    edges = []
    for _ in range(m):
        r = int(rng.integers(ranks[0], min(ranks[1], n) + 1))
        edges.append(tuple(rng.choice(n, size=r, replace=False)))
    w = rng.uniform(0.5, 2.0, m) if weighted else np.ones(m)
    return Hypergraph.from_edges(n, edges, w)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
