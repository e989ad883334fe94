"""Seeded random instances with planted ground truth.

Randomness comes from Philox streams.  The stream for a block pair is keyed
by ``(seed, model tag, i, j)`` through :class:`numpy.random.SeedSequence`, so
draws for one pair never depend on how many draws another pair consumed.
Edges inside a block pair are sampled by drawing a binomial count and then a
uniform set of distinct pair indices, which keeps the cost proportional to
the number of edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np
from scipy.spatial import cKDTree

from densekit.graph import Digraph, DomainError, Graph, Hypergraph

_TAGS = {"sbm": 1, "meta_sbm": 2, "local_sbm3": 3, "cbm": 4, "cbm_plus": 5, "hyper_two_cluster": 6, "misc": 9}


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent Philox generator for ``seed`` and an integer key path."""
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def _check_prob(**probs):
    for name, p in probs.items():
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"{name}={p} is not a probability")


def _sample_indices(rng: np.random.Generator, total: int, p: float) -> np.ndarray:
    if total <= 0 or p <= 0:
        return np.zeros(0, dtype=np.int64)
    if p >= 1:
        return np.arange(total, dtype=np.int64)
    count = int(rng.binomial(total, p))
    if count == 0:
        return np.zeros(0, dtype=np.int64)
    return np.sort(rng.choice(total, size=count, replace=False)).astype(np.int64)


def triangle_pair(idx: np.ndarray, s: int) -> tuple[np.ndarray, np.ndarray]:
    """Decode lexicographic indices of pairs a < b from range(s)."""
    idx = np.asarray(idx, dtype=np.int64)
    # Row a starts at offset a*s - a*(a+1)/2.
    a = (s - 2 - np.floor(np.sqrt(np.maximum(4.0 * s * (s - 1) - 8.0 * idx - 7.0, 0.0)) / 2.0 - 0.5)).astype(np.int64)
    start = a * s - a * (a + 1) // 2
    # Guard against rounding at row boundaries.
    over = idx < start
    a[over] -= 1
    start = a * s - a * (a + 1) // 2
    nxt = (a + 1) * s - (a + 1) * (a + 2) // 2
    under = idx >= nxt
    a[under] += 1
    start = a * s - a * (a + 1) // 2
    b = idx - start + a + 1
    return a, b


def _block_edges(rng, lo_i, size_i, lo_j, size_j, p):
    """Random edges inside block i (when i is j) or between blocks i and j."""
    if lo_i == lo_j:
        idx = _sample_indices(rng, size_i * (size_i - 1) // 2, p)
        a, b = triangle_pair(idx, size_i)
        return a + lo_i, b + lo_i
    idx = _sample_indices(rng, size_i * size_j, p)
    return idx // size_j + lo_i, idx % size_j + lo_j


@dataclass
class Planted:
    """Ground truth partition as a list of sorted vertex arrays."""

    blocks: list[np.ndarray] = field(default_factory=list)

    @property
    def labels(self) -> np.ndarray:
        n = sum(len(b) for b in self.blocks)
        lab = np.empty(n, dtype=np.int64)
        for i, b in enumerate(self.blocks):
            lab[b] = i
        return lab


def _offsets(sizes):
    return np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)


def _blocked_graph(seed, tag, sizes, prob) -> Graph:
    """Undirected graph where pair (i, j) of blocks is joined with probability prob(i, j)."""
    off = _offsets(sizes)
    src, dst = [], []
    for i in range(len(sizes)):
        for j in range(i, len(sizes)):
            p = prob(i, j)
            if p <= 0:
                continue
            a, b = _block_edges(stream(seed, tag, i, j), off[i], sizes[i], off[j], sizes[j], p)
            src.append(a)
            dst.append(b)
    n = int(off[-1])
    if not src:
        return Graph(n, np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros(0))
    s, d = np.concatenate(src), np.concatenate(dst)
    return Graph(n, s, d, np.ones(s.size))


def sbm(n: int, k: int, p: float, q: float, seed: int) -> tuple[Graph, Planted]:
    """k clusters whose sizes differ by at most one; intra pairs w.p. p, inter w.p. q."""
    _check_prob(p=p, q=q)
    if k < 1 or n < k:
        raise DomainError("need 1 ≤ k ≤ n")
    sizes = [len(b) for b in np.array_split(np.arange(n), k)]
    g = _blocked_graph(seed, _TAGS["sbm"], sizes, lambda i, j: p if i == j else q)
    off = _offsets(sizes)
    return g, Planted([np.arange(off[i], off[i + 1]) for i in range(k)])


def _meta_edges(M) -> set[tuple[int, int]]:
    if isinstance(M, Graph):
        pairs = zip(M.src.tolist(), M.dst.tolist())
        k = M.n
    else:
        k, pairs = M
    out = set()
    for a, b in pairs:
        a, b = int(a), int(b)
        if a == b or not (0 <= a < k and 0 <= b < k):
            raise DomainError("bad meta-graph edge")
        out.add((min(a, b), max(a, b)))
    return out


def cycle_meta_graph(k: int) -> Graph:
    return Graph.from_edges(k, [(i, (i + 1) % k) for i in range(k)] if k > 2 else [(0, 1)])


def meta_sbm(M, n: int, p: float, q: float, seed: int) -> tuple[Graph, Planted]:
    """Clusters of size n; cross edges only along meta-graph edges.

    ``M`` is a :class:`Graph` on the k meta-vertices or a ``(k, edge list)`` pair.
    """
    _check_prob(p=p, q=q)
    k = M.n if isinstance(M, Graph) else int(M[0])
    E = _meta_edges(M)
    g = _blocked_graph(seed, _TAGS["meta_sbm"], [n] * k,
                       lambda i, j: p if i == j else (q if (i, j) in E else 0.0))
    return g, Planted([np.arange(i * n, (i + 1) * n) for i in range(k)])


def local_sbm3(n1: int, p1: float, q1: float, seed: int):
    """Planted dense pair (C₁, C₂) inside a larger background cluster C₃.

    |C₁| = |C₂| = n₁ and |C₃| = 10 n₁.  Intra edges use p₁ in C₁, C₂ and
    2p₁ in C₃; C₁–C₂ pairs use q₁ and pairs touching C₃ use 0.1 p₁.
    """
    _check_prob(p1=p1, q1=q1, p2=min(2 * p1, 1.0))
    sizes = [n1, n1, 10 * n1]
    P = np.array([[p1, q1, 0.1 * p1], [q1, p1, 0.1 * p1], [0.1 * p1, 0.1 * p1, 2 * p1]])
    g = _blocked_graph(seed, _TAGS["local_sbm3"], sizes, lambda i, j: float(P[i, j]))
    off = _offsets(sizes)
    C1, C2, C3 = (np.arange(off[i], off[i + 1]) for i in range(3))
    return g, C1, C2, C3


def _orient(rng, a, b, forward_prob):
    """Keep a→b with probability forward_prob, otherwise flip to b→a."""
    keep = rng.random(a.size) < forward_prob
    return np.where(keep, a, b), np.where(keep, b, a)


def _directed_blocks(seed, tag, sizes, plan):
    """plan(i, j) -> (probability, probability the arc points i→j) or None."""
    off = _offsets(sizes)
    tails, heads = [], []
    for i in range(len(sizes)):
        for j in range(i, len(sizes)):
            spec = plan(i, j)
            if spec is None or spec[0] <= 0:
                continue
            p, fwd = spec
            rng = stream(seed, tag, i, j)
            a, b = _block_edges(rng, off[i], sizes[i], off[j], sizes[j], p)
            t, h = _orient(rng, a, b, fwd)
            tails.append(t)
            heads.append(h)
    n = int(off[-1])
    t = np.concatenate(tails) if tails else np.zeros(0, np.int64)
    h = np.concatenate(heads) if heads else np.zeros(0, np.int64)
    return Digraph(n, t, h, np.ones(t.size))


def _cbm_plan(k, p, q, eta):
    def plan(i, j):
        if i == j and i < k:
            return (p, 0.5)
        if i < k and j < k:
            if j == (i + 1) % k:
                return (q, eta)
            if i == (j + 1) % k:
                return (q, 1.0 - eta)
        return None
    return plan


def cbm(k: int, n: int, p: float, q: float, eta: float, seed: int) -> tuple[Digraph, Planted]:
    """Cyclic block model: C_i → C_{i+1 mod k} arcs oriented forward w.p. η."""
    _check_prob(p=p, q=q, eta=eta)
    if k < 2:
        raise DomainError("need k ≥ 2")
    d = _directed_blocks(seed, _TAGS["cbm"], [n] * k, _cbm_plan(k, p, q, eta))
    return d, Planted([np.arange(i * n, (i + 1) * n) for i in range(k)])


def cbm_plus(k: int, n: int, p: float, q: float, eta: float, n_local: int, q1_local: float,
             q2_local: float, eta_local: float, seed: int) -> tuple[Digraph, Planted]:
    """CBM plus two small clusters A = C_{k+1}, B = C_{k+2} of size n_local.

    A–B pairs join w.p. q1_local with random direction.  Pairs between A ∪ B
    and C₁ join w.p. q2_local; they point C₁ → A and B → C₁ w.p. eta_local,
    so A, B and C₁ form a short directed cycle.
    """
    _check_prob(p=p, q=q, eta=eta, q1_local=q1_local, q2_local=q2_local, eta_local=eta_local)
    if k < 2:
        raise DomainError("need k ≥ 2")
    base = _cbm_plan(k, p, q, eta)
    A, B = k, k + 1

    def plan(i, j):
        if i < k and j < k:
            return base(i, j)
        if i == j:
            return (p, 0.5)
        if (i, j) == (A, B):
            return (q1_local, 0.5)
        if i == 0 and j == A:
            return (q2_local, eta_local)        # C₁ → A
        if i == 0 and j == B:
            return (q2_local, 1.0 - eta_local)  # B → C₁
        return None

    sizes = [n] * k + [n_local, n_local]
    d = _directed_blocks(seed, _TAGS["cbm_plus"], sizes, plan)
    off = _offsets(sizes)
    return d, Planted([np.arange(off[i], off[i + 1]) for i in range(k + 2)])


def _sample_subsets(rng, pool: np.ndarray, r: int, count: int, accept, taken: set) -> list[tuple]:
    """Draw ``count`` distinct r-subsets of ``pool`` passing ``accept``, by rejection."""
    out = []
    while len(out) < count:
        cand = tuple(sorted(rng.choice(pool, size=r, replace=False).tolist()))
        if cand in taken or not accept(cand):
            continue
        taken.add(cand)
        out.append(cand)
    return out


def hyper_two_cluster(n: int, r: int, p: float, q: float, seed: int):
    """r-uniform hypergraph on halves L, R: one-sided r-subsets w.p. p, mixed w.p. q.

    Counts are binomial over the subset classes and subsets are drawn by
    rejection, discarding repeats, so C(n, r) is never enumerated.
    """
    _check_prob(p=p, q=q)
    if r < 2 or n < 2 * r:
        raise DomainError("need r ≥ 2 and n ≥ 2r")
    half = n // 2
    L, R = np.arange(half), np.arange(half, n)
    inside_L, inside_R = comb(half, r), comb(n - half, r)
    mixed = comb(n, r) - inside_L - inside_R
    tag = _TAGS["hyper_two_cluster"]
    taken: set = set()
    edges = []
    for idx, (pool, total, prob, accept) in enumerate([
        (L, inside_L, p, lambda s: True),
        (R, inside_R, p, lambda s: True),
        (np.arange(n), mixed, q, lambda s: s[0] < half <= s[-1]),
    ]):
        rng = stream(seed, tag, idx)
        count = int(rng.binomial(total, prob)) if prob > 0 else 0
        count = min(count, total)
        if count > total // 2:
            raise DomainError("rejection sampling needs sparse edge classes")
        edges += _sample_subsets(rng, pool, r, count, accept, taken)
    return Hypergraph.from_edges(n, edges), L, R


# ---------------------------------------------------------------------------
# Similarity graphs


def knn_graph(points, k: int) -> Graph:
    """Union-symmetrised k-nearest-neighbour graph; distance ties broken by index."""
    X = np.asarray(points, dtype=float)
    n = X.shape[0]
    if not 1 <= k < n:
        raise DomainError("need 1 ≤ k < n")
    d2 = np.sum((X[:, None, :] - X[None, :, :]) ** 2, axis=2) if n <= 2000 else None
    src, dst = [], []
    if d2 is not None:
        np.fill_diagonal(d2, np.inf)
        for u in range(n):
            order = np.lexsort((np.arange(n), d2[u]))[:k]
            src.extend([u] * k)
            dst.extend(order.tolist())
    else:
        tree = cKDTree(X)
        _, nbrs = tree.query(X, k=k + 1)
        for u in range(n):
            row = [v for v in nbrs[u] if v != u][:k]
            src.extend([u] * len(row))
            dst.extend(row)
    src, dst = np.asarray(src), np.asarray(dst)
    uv = np.unique(np.sort(np.stack([src, dst], axis=1), axis=1), axis=0)
    return Graph(n, uv[:, 0], uv[:, 1], np.ones(uv.shape[0]))


def gaussian_graph(points, sigma: float) -> Graph:
    """Complete graph with weight exp(−‖u − v‖² / 2σ²); zero weights are dropped."""
    X = np.asarray(points, dtype=float)
    if sigma <= 0:
        raise DomainError("sigma must be positive")
    n = X.shape[0]
    iu, iv = np.triu_indices(n, k=1)
    d2 = np.sum((X[iu] - X[iv]) ** 2, axis=1)
    w = np.exp(-d2 / (2.0 * sigma**2))
    keep = w > 0
    return Graph(n, iu[keep], iv[keep], w[keep])


GENERATORS = {
    "sbm": sbm,
    "meta_sbm": meta_sbm,
    "local_sbm3": local_sbm3,
    "cbm": cbm,
    "cbm_plus": cbm_plus,
    "hyper_two_cluster": hyper_two_cluster,
}
