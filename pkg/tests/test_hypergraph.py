import numpy as np
import pytest
from conftest import random_graph, random_hypergraph
from hypothesis import given
from hypothesis import strategies as st

import oracles
from densekit.graph import DomainError, Graph, Hypergraph, hyper_bipartiteness
from densekit.hypergraph import (DiffusionState, clique_cut, clique_pair_instance, clique_reduction,
                                 clique_start_vector, compute_change_rate, diffusion_step, discrepancy,
                                 even_split_rate, find_bipartite_components, quadratic_form, random_reduction,
                                 rate_norm_sides, rayleigh_quotient, snap, two_sided_sweep_hyper, verify_rate_plan)
from densekit.spectral import LaplacianKind, smallest_eigs


def graph_as_hypergraph(g: Graph) -> Hypergraph:
    return Hypergraph.from_edges(g.n, [(u, v) for u, v, _ in g.edges], [w for _, _, w in g.edges])


def tie_free(rng, n):
    return rng.permutation(n) + rng.uniform(0, 0.5, n) - n / 2


def two_colourable(rng, n=10, m=12):
    """Every edge has members on both sides of a fixed ±1 colouring."""
    col = np.where(np.arange(n) < n // 2, -1.0, 1.0)
    edges = []
    for _ in range(m):
        a = rng.choice(n // 2, size=int(rng.integers(1, 3)), replace=False)
        b = n // 2 + rng.choice(n - n // 2, size=int(rng.integers(1, 3)), replace=False)
        edges.append(tuple(a) + tuple(b))
    return Hypergraph.from_edges(n, edges), col


def test_discrepancy_and_quadratic_form(rng):
    for _ in range(20):
        h = random_hypergraph(rng, 12, 10)
        f = rng.normal(size=12)
        assert quadratic_form(h, f) == pytest.approx(oracles.hyper_discrepancy_sum(h, f), rel=1e-12)
    h = Hypergraph.from_edges(3, [(0, 1, 2)])
    assert discrepancy(h, np.array([1.0, 1.0, -2.0])).tolist() == [-1.0]


def test_snap_classes():
    f, key = snap(np.array([1.0, 1.0 + 1e-15, -0.5]))
    assert key[0] == key[1] and f[0] == f[1]
    with pytest.raises(DomainError):
        snap(np.array([np.nan]))


def test_rank2_matches_graph_operator(rng):
    for _ in range(25):
        g = random_graph(rng, 9, 0.5, connected=True)
        h = graph_as_hypergraph(g)
        f = tie_free(rng, 9)
        plan = compute_change_rate(h, f)
        assert np.allclose(plan.r, oracles.graph_operator_rate(g, f), atol=1e-9)
        assert np.allclose(even_split_rate(h, f), plan.r, atol=1e-9)


def test_worked_three_vertex_edge():
    h = Hypergraph.from_edges(3, [(0, 1, 2)])
    f = np.array([1.0, 1.0, -2.0])
    plan = compute_change_rate(h, f)
    assert plan.r[0] == pytest.approx(plan.r[1])
    assert plan.r[0] + plan.r[1] == pytest.approx(1.0)
    assert plan.r[2] == pytest.approx(1.0)
    assert verify_rate_plan(h, f, plan).ok


def test_colouring_gives_zero_rate(rng):
    h, col = two_colourable(rng)
    plan = compute_change_rate(h, col)
    assert np.allclose(plan.r, 0.0)
    st_ = diffusion_step(h, DiffusionState(f=col / np.sqrt(h.degree @ col**2)))
    assert np.allclose(st_.f * np.sqrt(h.degree @ col**2), col)


def test_random_plans_verify(rng):
    for _ in range(40):
        h = random_hypergraph(rng, 10, 8, weighted=False)
        f = rng.integers(-2, 3, 10).astype(float)  # many ties
        plan = compute_change_rate(h, f)
        rep = verify_rate_plan(h, f, plan)
        assert rep.ok, rep
        lhs, rhs = rate_norm_sides(h, plan)
        assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


def test_rate_decomposes_over_edges(rng):
    h = random_hypergraph(rng, 10, 9)
    f = rng.integers(-2, 3, 10).astype(float)
    plan = compute_change_rate(h, f)
    total = np.zeros(10)
    for (e, v), val in plan.edge_contrib.items():
        assert v in plan.S[e] or v in plan.I[e]
        total[v] += val
    assert np.allclose(total, plan.r, atol=1e-9)


def test_delta_strictly_decreases_within_class(rng):
    for _ in range(30):
        h = random_hypergraph(rng, 10, 10, weighted=False)
        plan = compute_change_rate(h, rng.integers(-1, 2, 10).astype(float))
        by_cls = {}
        for lv in plan.levels:
            by_cls.setdefault(lv.cls, []).append(lv.delta)
        for deltas in by_cls.values():
            assert all(a > b for a, b in zip(deltas, deltas[1:]))


def test_pivot_rules_and_float_agree(rng):
    for _ in range(20):
        h = random_hypergraph(rng, 9, 9, weighted=False)
        f = rng.integers(-2, 3, 9).astype(float)
        a = compute_change_rate(h, f, exact=True, pivot_rule="bland").r
        b = compute_change_rate(h, f, exact=True, pivot_rule="dantzig").r
        c = compute_change_rate(h, f, exact=False).r
        assert np.array_equal(a, b)
        assert np.allclose(a, c, atol=1e-9)


def test_zero_discrepancy_step_is_identity():
    h = Hypergraph.from_edges(4, [(0, 1), (2, 3, 0)])
    f = np.array([1.0, -1.0, -1.0, 1.0])
    f = f / np.sqrt(h.degree @ f**2)
    for mode in ("lp", "approx"):
        out = diffusion_step(h, DiffusionState(f=f), mode)
        assert np.allclose(out.f, f)
    with pytest.raises(DomainError):
        diffusion_step(h, DiffusionState(f=f), "magic")


def test_rayleigh_quotient_does_not_rise(rng):
    for _ in range(10):
        h = random_hypergraph(rng, 10, 12)
        f = rng.normal(size=10)
        f = f / np.sqrt(h.degree @ f**2)
        st_ = DiffusionState(f=f, eps=0.1)
        for _ in range(5):
            nxt = diffusion_step(h, st_)
            assert rayleigh_quotient(h, nxt.f) <= rayleigh_quotient(h, st_.f) + 1e-6
            st_ = nxt


def test_rayleigh_domain():
    h = Hypergraph.from_edges(3, [(0, 1)])
    with pytest.raises(DomainError):
        rayleigh_quotient(h, np.array([0.0, 0.0, 1.0]))


def test_colourable_fixed_point(rng):
    h, col = two_colourable(rng)
    res = find_bipartite_components(h, f0=col)
    assert res.lam == pytest.approx(0.0, abs=1e-12)
    assert res.pair.metrics["beta_h"] == pytest.approx(0.0, abs=1e-12)


def test_clique_pair_eigenvector():
    for n in (12, 24):
        h, f = clique_pair_instance(n)
        plan = compute_change_rate(h, f)
        assert np.allclose(plan.r, -(1 - 4 / n) * f, atol=1e-9)
        assert rayleigh_quotient(h, f) == pytest.approx((n - 4) / n, abs=1e-9)
    with pytest.raises(DomainError):
        clique_pair_instance(10)


def test_diffusion_beats_clique_eigenvalue(rng):
    for _ in range(5):
        h = random_hypergraph(rng, 12, 14, ranks=(3, 4))
        if np.any(h.degree == 0):
            continue
        lam_z = smallest_eigs(clique_reduction(h), 1, LaplacianKind.SIGNLESS).values[0]
        res = find_bipartite_components(h, f0=clique_start_vector(h), max_iters=200)
        assert res.lam < lam_z - 1e-9


def test_diffusion_cheeger_and_history(rng):
    for _ in range(8):
        h = random_hypergraph(rng, 12, 12)
        res = find_bipartite_components(h, f0=rng.normal(size=12), max_iters=150)
        assert res.pair.metrics["beta_h"] <= np.sqrt(2 * res.lam) + 1e-9
        assert np.all(np.diff(res.rq_history) <= 1e-6)


def test_sweep_single_edge_enumeration():
    h = Hypergraph.from_edges(3, [(0, 1, 2)])
    f = np.array([1.0, -2.0, 1.0])
    pair = two_sided_sweep_hyper(h, f)
    cands = [oracles.hyper_beta_loop(h, L, R) for L, R in oracles.two_sided_pairs(f)]
    assert pair.metrics["beta_h"] == pytest.approx(min(cands))
    with pytest.raises(DomainError):
        two_sided_sweep_hyper(h, np.zeros(3))


@given(st.integers(0, 10_000))
def test_sweep_matches_enumeration_and_bound(seed):
    rng = np.random.default_rng(seed)
    h = random_hypergraph(rng, 9, 8)
    f = rng.normal(size=9) * (rng.random(9) < 0.85)
    if not np.any(f) or h.degree[f != 0].sum() == 0:
        return
    pair = two_sided_sweep_hyper(h, f)
    cands = [oracles.hyper_beta_loop(h, L, R) for L, R in oracles.two_sided_pairs(f)
             if h.degree[list(L | R)].sum() > 0]
    assert pair.metrics["beta_h"] == pytest.approx(min(cands), abs=1e-12)
    nz = h.degree > 0
    if np.any(f[nz]):
        assert pair.metrics["beta_h"] <= np.sqrt(2 * rayleigh_quotient(h, f)) + 1e-9


def test_signed_indicator_bound(rng):
    for _ in range(50):
        h = random_hypergraph(rng, 10, 10)
        lab = rng.integers(0, 3, 10)
        chi = np.where(lab == 0, -1.0, np.where(lab == 1, 1.0, 0.0))
        if h.degree[chi != 0].sum() == 0:
            continue
        L, R = np.flatnonzero(lab == 0), np.flatnonzero(lab == 1)
        assert rayleigh_quotient(h, chi) <= 2 * hyper_bipartiteness(h, L, R) + 1e-12


def test_reductions():
    h = Hypergraph.from_edges(3, [(0, 1, 2)])
    g = clique_reduction(h)
    assert g.m == 3 and np.allclose(g.weight, 0.5) and np.allclose(g.degree, 1.0)
    h2 = Hypergraph.from_edges(3, [(0, 2)], [3.0])
    assert clique_reduction(h2).edges == [(0, 2, 3.0)]
    assert random_reduction(h2, np.random.default_rng(0)).edges == [(0, 2, 3.0)]


def test_reduction_distortion_factor_r():
    r, m = 8, 4000
    rng = np.random.default_rng(5)
    L, R = np.arange(r), np.arange(r, 2 * r)
    h1 = Hypergraph.from_edges(2 * r, [(int(rng.choice(L)),) + tuple(rng.choice(R, r - 1, replace=False))
                                       for _ in range(m)])
    h2 = Hypergraph.from_edges(2 * r, [tuple(rng.choice(L, r // 2, replace=False))
                                       + tuple(rng.choice(R, r // 2, replace=False)) for _ in range(m)])

    def cut(g):
        return sum(w for u, v, w in g.edges if (u < r) != (v < r))

    ratio1 = cut(random_reduction(h1, rng)) / h1.weight.sum()
    ratio2 = cut(random_reduction(h2, rng)) / h2.weight.sum()
    assert ratio1 == pytest.approx(2 / r, abs=0.03)
    assert ratio2 == pytest.approx(r / (2 * (r - 1)), abs=0.03)
    c1 = cut(clique_reduction(h1)) / h1.weight.sum()
    c2 = cut(clique_reduction(h2)) / h2.weight.sum()
    # Both reductions treat the two instances differently by a factor of order r.
    assert c1 == pytest.approx(1.0) and c2 == pytest.approx(r * r / (4 * (r - 1)))
    assert ratio2 / ratio1 > r / 4


def test_clique_cut_on_colourable():
    # Complete bipartite pattern: every edge has one vertex on the left and two on the right.
    edges = [(a, b, c) for a in range(3) for b in range(3, 6) for c in range(b + 1, 6)]
    h = Hypergraph.from_edges(6, edges)
    pair = clique_cut(h)
    assert pair.metrics["beta_h"] == pytest.approx(0.0, abs=1e-12)
    assert clique_cut(h).L == pair.L
