"""Local discovery of densely connected pairs via Pagerank on the implicit double cover.

Copy 1 of vertex u is written ``(u, 1)`` and copy 2 ``(u, 2)``.  Both copies
have degree deg(u), and (u, i) is adjacent to (v, 3 − i) for every edge
{u, v}.  The cover is never materialised.
"""

from __future__ import annotations

import math
import time
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from densekit.graph import BipartitePair, DomainError, Graph, bipartiteness


@dataclass
class DcVector:
    """Pagerank mass ``p`` and residual ``r`` on both copies, as sparse maps."""

    p1: dict = field(default_factory=dict)
    p2: dict = field(default_factory=dict)
    r1: dict = field(default_factory=dict)
    r2: dict = field(default_factory=dict)

    def mass(self, side: int) -> dict:
        return self.p1 if side == 1 else self.p2

    def residual(self, side: int) -> dict:
        return self.r1 if side == 1 else self.r2

    def total(self) -> float:
        return sum(self.p1.values()) + sum(self.p2.values()) + sum(self.r1.values()) + sum(self.r2.values())

    def dense(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """(p, r) as length-2n arrays indexed like :func:`densekit.graph.double_cover`."""
        p, r = np.zeros(2 * n), np.zeros(2 * n)
        for d, off in ((self.p1, 0), (self.p2, n)):
            for u, val in d.items():
                p[u + off] = val
        for d, off in ((self.r1, 0), (self.r2, n)):
            for u, val in d.items():
                r[u + off] = val
        return p, r


def dc_push(alpha: float, node: tuple[int, int], state: DcVector, g: Graph) -> DcVector:
    """Move an α share of the residual at (u, i) into mass; spread the rest lazily.

    Half of the remaining (1 − α) share stays at (u, i) and the other half
    goes to the opposite copies of u's neighbours in proportion to edge weight.
    The state is updated in place and returned.
    """
    u, side = node
    res = state.residual(side)
    ru = res.get(u, 0.0)
    if ru <= 0:
        raise DomainError("push needs positive residual")
    mass = state.mass(side)
    mass[u] = mass.get(u, 0.0) + alpha * ru
    res[u] = (1.0 - alpha) * ru / 2.0
    other = state.residual(3 - side)
    nbrs, w = g.neighbors(u)
    share = (1.0 - alpha) * ru / (2.0 * float(g.degree[u]))
    for v, wv in zip(nbrs.tolist(), w.tolist()):
        other[v] = other.get(v, 0.0) + share * wv
    return state


@dataclass
class AprResult:
    state: DcVector
    pushes: int
    work: float
    """Σ deg(u) over all pushes."""


def apr_dc(g: Graph, v: int, alpha: float, eps: float, side: int = 1) -> AprResult:
    """Approximate Pagerank on the double cover from (v, side), FIFO push order.

    Stops once r(x)/deg(x) < eps on every copy.
    """
    if not 0 < alpha <= 1:
        raise DomainError("alpha must lie in (0, 1]")
    if eps <= 0:
        raise DomainError("eps must be positive")
    deg = g.degree
    if deg[v] <= 0:
        raise DomainError("seed vertex has zero degree")
    A = g.adjacency
    indptr, indices, data = A.indptr, A.indices, A.data
    n = g.n
    p = np.zeros((2, n))
    r = np.zeros((2, n))
    queued = np.zeros((2, n), dtype=bool)
    r[side - 1, v] = 1.0
    queue: deque = deque()
    if r[side - 1, v] >= eps * deg[v]:
        queue.append((side - 1, v))
        queued[side - 1, v] = True
    pushes, work = 0, 0.0
    keep = 1.0 - alpha
    while queue:
        s, u = queue.popleft()
        queued[s, u] = False
        ru = r[s, u]
        du = deg[u]
        if ru < eps * du:
            continue
        p[s, u] += alpha * ru
        r[s, u] = keep * ru / 2.0
        lo, hi = indptr[u], indptr[u + 1]
        nb = indices[lo:hi]
        o = 1 - s
        r[o, nb] += (keep * ru / (2.0 * du)) * data[lo:hi]
        pushes += 1
        work += du
        hot = nb[(r[o, nb] >= eps * deg[nb]) & ~queued[o, nb]]
        if hot.size:
            queued[o, hot] = True
            queue.extend((o, int(x)) for x in hot)
        if r[s, u] >= eps * du and not queued[s, u]:
            queued[s, u] = True
            queue.append((s, u))
    state = DcVector(
        p1={int(x): float(p[0, x]) for x in np.flatnonzero(p[0])},
        p2={int(x): float(p[1, x]) for x in np.flatnonzero(p[1])},
        r1={int(x): float(r[0, x]) for x in np.flatnonzero(r[0])},
        r2={int(x): float(r[1, x]) for x in np.flatnonzero(r[1])},
    )
    return AprResult(state=state, pushes=pushes, work=work)


def simplify(p1: dict, p2: dict) -> tuple[dict, dict]:
    """σ: keep only the excess of each vertex's larger copy over its smaller one."""
    q1, q2 = {}, {}
    for u in set(p1) | set(p2):
        a, b = p1.get(u, 0.0), p2.get(u, 0.0)
        if a > b:
            q1[u] = a - b
        elif b > a:
            q2[u] = b - a
    return q1, q2


def simplify_dense(p: np.ndarray) -> np.ndarray:
    """σ on a length-2n vector laid out as [copy 1 | copy 2]."""
    n = p.size // 2
    a, b = p[:n], p[n:]
    return np.concatenate([np.maximum(0.0, a - b), np.maximum(0.0, b - a)])


@dataclass
class SweepPairResult:
    L: frozenset
    R: frozenset
    beta: float
    volume: float
    sweep_index: int
    found: bool
    pushes: int = 0
    runtime_ms: float = 0.0
    cover_conductance: float = math.inf
    """Φ of the chosen prefix in the double cover; equals ``beta`` up to rounding."""

    def as_pair(self) -> BipartitePair:
        return BipartitePair(self.L, self.R, {"beta": self.beta} if (self.L or self.R) else {})


def cover_sweep(g: Graph, q1: dict, q2: dict):
    """Order the support of a simple cover vector by q(x)/deg(x) and score every prefix.

    Ties are broken by copy side, then vertex index.  Returns the ordered
    nodes and the cover conductance of each prefix.
    """
    deg = g.degree
    nodes = [(u, 1, val) for u, val in q1.items() if val > 0] + [(u, 2, val) for u, val in q2.items() if val > 0]
    nodes.sort(key=lambda t: (-t[2] / deg[t[0]], t[1], t[0]))
    total = 2.0 * g.total_volume
    inside = np.zeros((2, g.n), dtype=bool)
    A = g.adjacency
    cut = vol = 0.0
    phi = np.empty(len(nodes))
    for j, (u, side, _) in enumerate(nodes):
        lo, hi = A.indptr[u], A.indptr[u + 1]
        nb, w = A.indices[lo:hi], A.data[lo:hi]
        # Neighbours of (u, side) are the opposite copies of u's neighbours.
        linked = float(w[inside[2 - side, nb]].sum())
        cut += deg[u] - 2.0 * linked
        vol += deg[u]
        inside[side - 1, u] = True
        denom = min(vol, total - vol)
        phi[j] = cut / denom if denom > 0 else math.inf
    return nodes, phi


def loc_bipart_dc(g: Graph, u: int, gamma: float, beta_hat: float,
                  alpha: float | None = None, eps: float | None = None) -> SweepPairResult:
    """Local search for a pair (L, R) around u with β(L, R) ≤ beta_hat.

    Defaults follow the analysis: α = β̂²/378 and ε = 1/(20γ).  Either can
    be overridden, since those constants are very conservative in practice.
    Returns the first sweep prefix of σ∘p whose cover conductance is at most
    beta_hat; otherwise a not-found result carrying the best β seen.
    """
    if gamma <= 0 or not 0 < beta_hat <= 1:
        raise DomainError("need gamma > 0 and 0 < beta_hat ≤ 1")
    alpha = beta_hat**2 / 378.0 if alpha is None else alpha
    eps = 1.0 / (20.0 * gamma) if eps is None else eps
    t0 = time.perf_counter()
    apr = apr_dc(g, u, alpha, eps)
    q1, q2 = simplify(apr.state.p1, apr.state.p2)
    nodes, phi = cover_sweep(g, q1, q2)
    ms = 1000.0 * (time.perf_counter() - t0)
    if not nodes:
        return SweepPairResult(frozenset(), frozenset(), math.inf, 0.0, -1, False, apr.pushes, ms)
    hits = np.flatnonzero(phi <= beta_hat)
    found = hits.size > 0
    j = int(hits[0]) if found else int(np.argmin(phi))
    L = frozenset(x for x, s, _ in nodes[: j + 1] if s == 1)
    R = frozenset(x for x, s, _ in nodes[: j + 1] if s == 2)
    vol = float(g.degree[list(L | R)].sum())
    return SweepPairResult(L, R, bipartiteness(g, L, R), vol, j, found, apr.pushes, ms, float(phi[j]))


def loc_bipart_dc_for_target(g: Graph, u: int, gamma: float, beta: float, **kw) -> SweepPairResult:
    """Run with β̂ = √(7560 β), the output target matching an input target β."""
    return loc_bipart_dc(g, u, gamma, min(1.0, math.sqrt(7560.0 * beta)), **kw)


@dataclass
class LSCurve:
    """Piecewise-linear curve through (vol(S_j), p(S_j)) of the sweep prefixes of p."""

    x: np.ndarray
    y: np.ndarray

    def __call__(self, vol) -> np.ndarray:
        return np.interp(vol, self.x, self.y)


def ls_curve(p, g: Graph) -> LSCurve:
    p = np.asarray(p, dtype=float)
    if np.any(p < 0):
        raise DomainError("p must be nonnegative")
    deg = g.degree
    if np.any((p > 0) & (deg <= 0)):
        raise DomainError("mass on a zero-degree vertex")
    pos = deg > 0
    idx = np.flatnonzero(pos)
    order = idx[np.lexsort((idx, -p[idx] / deg[idx]))]
    x = np.concatenate([[0.0], np.cumsum(deg[order])])
    y = np.concatenate([[0.0], np.cumsum(p[order])])
    return LSCurve(x=x, y=y)


