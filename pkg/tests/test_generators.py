import numpy as np
import pytest

from densekit.generators import (cbm, cbm_plus, cycle_meta_graph, gaussian_graph, hyper_two_cluster, knn_graph,
                                 local_sbm3, meta_sbm, sbm, stream)
from densekit.graph import DomainError, bipartiteness, flow_ratio
from densekit.spectral import meta_graph_of


def test_stream_independence_and_determinism():
    assert stream(1, 2, 3).random() == stream(1, 2, 3).random()
    assert stream(1, 2, 3).random() != stream(1, 2, 4).random()


def test_sbm_deterministic():
    a, _ = sbm(80, 3, 0.2, 0.05, seed=9)
    b, _ = sbm(80, 3, 0.2, 0.05, seed=9)
    assert a.edges == b.edges


def test_sbm_extremes():
    g, pl = sbm(12, 3, 1.0, 0.0, seed=0)
    assert g.m == 3 * 6
    assert [b.size for b in pl.blocks] == [4, 4, 4]
    assert np.all(g.subgraph_components() == pl.labels)


def test_sbm_edge_count_moments():
    n, k, p, q = 90, 3, 0.2, 0.05
    counts = [sbm(n, k, p, q, seed=s)[0].m for s in range(30)]
    intra, inter = 3 * 30 * 29 / 2, 3 * 30 * 30
    mean = p * intra + q * inter
    var = p * (1 - p) * intra + q * (1 - q) * inter
    assert abs(np.mean(counts) - mean) <= 4 * np.sqrt(var / 30)


def test_sbm_rejects_bad_probability():
    with pytest.raises(DomainError):
        sbm(10, 2, 1.5, 0.1, seed=0)


def test_meta_sbm_respects_meta_graph():
    g, pl = meta_sbm(cycle_meta_graph(5), 30, 0.3, 0.2, seed=1)
    A = meta_graph_of(g, pl.blocks).adjacency
    for i in range(5):
        for j in range(5):
            if i != j and (i - j) % 5 not in (1, 4):
                assert A[i, j] == 0
            elif i != j:
                assert A[i, j] > 0


def test_local_sbm3_sizes_and_beta():
    g, C1, C2, C3 = local_sbm3(100, 0.02, 0.2, seed=4)
    assert C1.size == C2.size == 100 and C3.size == 1000
    assert g.n == 1200
    assert bipartiteness(g, C1, C2) < 0.5


def test_cbm_orientation_rate():
    d, pl = cbm(3, 200, 0.01, 0.05, 0.9, seed=2)
    A, B = pl.blocks[0], pl.blocks[1]
    fwd = sum(1 for u, v, _ in d.arcs if u in set(A) and v in set(B))
    back = sum(1 for u, v, _ in d.arcs if u in set(B) and v in set(A))
    assert fwd / (fwd + back) == pytest.approx(0.9, abs=0.05)


def test_cbm_plus_one_way_cycle():
    d, pl = cbm_plus(3, 100, 0.01, 0.05, 0.9, 30, 0.5, 0.05, 1.0, seed=3)
    C1, A, B = set(pl.blocks[0]), set(pl.blocks[3]), set(pl.blocks[4])
    for u, v, _ in d.arcs:
        assert not (u in A and v in C1)
        assert not (u in C1 and v in B)
    assert flow_ratio(d, pl.blocks[3], pl.blocks[4]) < 1.0


def test_hyper_two_cluster_counts():
    h, L, R = hyper_two_cluster(200, 3, 1e-4, 4e-4, seed=0)
    assert h.n == 200 and L.size == R.size == 100
    assert np.all(h.rank == 3)
    assert 250 <= h.m <= 650
    h2, _, _ = hyper_two_cluster(200, 3, 1e-4, 4e-4, seed=0)
    assert h.edges == h2.edges


def test_knn_graph_degrees_and_ties():
    pts = np.array([[0.0], [1.0], [2.0], [3.0]])
    g = knn_graph(pts, 1)
    # Vertex 1 is equidistant from 0 and 2; the index tiebreak picks 0.
    assert sorted((u, v) for u, v, _ in g.edges) == [(0, 1), (1, 2), (2, 3)]
    rng = np.random.default_rng(0)
    g = knn_graph(rng.normal(size=(40, 2)), 3)
    assert np.all(g.degree >= 3)


def test_gaussian_graph_limits():
    pts = np.random.default_rng(1).normal(size=(6, 2))
    g = gaussian_graph(pts, 1e6)
    assert g.m == 15 and np.allclose(g.weight, 1.0)
    with pytest.raises(DomainError):
        gaussian_graph(pts, 0.0)
