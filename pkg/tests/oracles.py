"""Independent reference computations: dense matrices, brute force and plain loops.

Nothing here imports densekit's algorithms; only the container types are shared.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np


def dense_adjacency(n, edges):
    A = np.zeros((n, n))
    for u, v, w in edges:
        A[u, v] += w
        A[v, u] += w
    return A


def graph_edges(g):
    return [(int(u), int(v), float(w)) for u, v, w in zip(g.src, g.dst, g.weight)]


def cover_adjacency(g):
    """Explicit double cover: {u, v} becomes {u₁, v₂} and {u₂, v₁}."""
    n = g.n
    A = np.zeros((2 * n, 2 * n))
    for u, v, w in graph_edges(g):
        A[u, v + n] += w
        A[v + n, u] += w
        A[v, u + n] += w
        A[u + n, v] += w
    return A


def semi_cover_adjacency(d):
    n = d.n
    A = np.zeros((2 * n, 2 * n))
    for u, v, w in d.arcs:
        A[u, v + n] += w
        A[v + n, u] += w
    return A


def set_conductance(A, S):
    """w(S, S̄)/min(vol S, vol S̄) straight from a dense adjacency."""
    mask = np.zeros(A.shape[0], dtype=bool)
    mask[list(S)] = True
    deg = A.sum(axis=1)
    cut = A[mask][:, ~mask].sum()
    return cut / min(deg[mask].sum(), deg[~mask].sum())


def beta_loop(n, edges, L, R):
    L, R = set(L), set(R)
    vol = 0.0
    deg = np.zeros(n)
    for u, v, w in edges:
        deg[u] += w
        deg[v] += w
    vol = sum(deg[x] for x in L | R)
    cross = sum(w for u, v, w in edges if (u in L and v in R) or (u in R and v in L))
    return 1 - 2 * cross / vol


def flow_ratio_loop(n, arcs, L, R):
    L, R = set(L), set(R)
    out = np.zeros(n)
    inn = np.zeros(n)
    for u, v, w in arcs:
        out[u] += w
        inn[v] += w
    fwd = sum(w for u, v, w in arcs if u in L and v in R)
    return 1 - 2 * fwd / (sum(out[x] for x in L) + sum(inn[x] for x in R))


def brute_min_conductance(A):
    n = A.shape[0]
    best = np.inf
    for k in range(1, n):
        for S in itertools.combinations(range(n), k):
            best = min(best, set_conductance(A, S))
    return best


def dense_ppr_cover(g, v, alpha, seed_vec=None):
    """Solve ppr = α s + (1 − α) ppr W on the explicit double cover, W = (I + D⁻¹A)/2."""
    A = cover_adjacency(g)
    deg = A.sum(axis=1)
    deg[deg == 0] = 1
    W = 0.5 * (np.eye(A.shape[0]) + A / deg[:, None])
    if seed_vec is None:
        seed_vec = np.zeros(A.shape[0])
        seed_vec[v] = 1.0
    M = np.eye(A.shape[0]) - (1 - alpha) * W
    return np.linalg.solve(M.T, alpha * seed_vec)


def lazy_walk_cover(g):
    """Row-vector step p ↦ pW on the explicit double cover."""
    A = cover_adjacency(g)
    deg = A.sum(axis=1)
    deg[deg == 0] = 1
    return 0.5 * (np.eye(A.shape[0]) + A / deg[:, None])


def sigma(p):
    n = p.size // 2
    a, b = p[:n], p[n:]
    return np.concatenate([np.maximum(a - b, 0), np.maximum(b - a, 0)])


def esp_kernel(A, S):
    """Every next set of the ESP from S with its probability, by scanning breakpoints of t."""
    n = A.shape[0]
    deg = A.sum(axis=1)
    inS = np.zeros(n, dtype=bool)
    inS[list(S)] = True
    h = np.array([0.5 * inS[v] + 0.5 * A[v, inS].sum() / deg[v] if deg[v] else float(inS[v]) for v in range(n)])
    cuts = sorted(set([0.0, 1.0] + [x for x in h if 0 < x < 1]))
    out = {}
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        t = 0.5 * (lo + hi)
        nxt = frozenset(int(v) for v in np.flatnonzero(h >= t))
        out[nxt] = out.get(nxt, 0.0) + (hi - lo)
    return out


def ari_pairs(a, b):
    """ARI from the explicit list of unordered pairs."""
    n = len(a)
    tp = tn = fp = fn = 0
    for i, j in itertools.combinations(range(n), 2):
        same_a, same_b = a[i] == a[j], b[i] == b[j]
        if same_a and same_b:
            tp += 1
        elif not same_a and not same_b:
            tn += 1
        elif same_b:
            fp += 1
        else:
            fn += 1
    den = (tp + fn) * (fn + tn) + (tp + fp) * (fp + tn)
    return 1.0 if den == 0 else 2 * (tp * tn - fp * fn) / den, (tp, tn, fp, fn)


def hyper_beta_loop(h, L, R):
    L, R = set(L), set(R)
    deg = np.zeros(h.n)
    total = 0.0
    for e, w in zip(h.edges, h.weight):
        for v in e:
            deg[v] += w
    for e, w in zip(h.edges, h.weight):
        es = set(e)
        inL, inR = es <= L, es <= R
        touchL, touchR = bool(es & L), bool(es & R)
        if inL or inR:
            total += 2 * w
        elif touchL and not touchR:
            total += w
        elif touchR and not touchL:
            total += w
    return total / sum(deg[v] for v in L | R)


def two_sided_pairs(f):
    """All threshold pairs ({|f| ≥ t, f < 0}, {|f| ≥ t, f ≥ 0}) over the distinct |f| values."""
    mags = sorted({abs(x) for x in f}, reverse=True)
    return [({i for i, x in enumerate(f) if abs(x) >= t and x < 0},
             {i for i, x in enumerate(f) if abs(x) >= t and x >= 0}) for t in mags]


def graph_operator_rate(g, f):
    """−D⁻¹(D + A)f for a plain graph."""
    A = dense_adjacency(g.n, graph_edges(g))
    d = A.sum(axis=1)
    return -(d * f + A @ f) / d


def hyper_discrepancy_sum(h, f):
    return sum(w * (max(f[v] for v in e) + min(f[v] for v in e)) ** 2 for e, w in zip(h.edges, h.weight))


def kmeans_brute_2(points, weights):
    """Optimal weighted 2-means cost by trying every bipartition."""
    n = len(points)
    best = np.inf
    for mask in range(1, 2 ** (n - 1)):
        side = np.array([(mask >> i) & 1 for i in range(n)], dtype=bool)
        cost = 0.0
        for part in (side, ~side):
            w = weights[part]
            c = (points[part] * w[:, None]).sum(axis=0) / w.sum()
            cost += float((w * ((points[part] - c) ** 2).sum(axis=1)).sum())
        best = min(best, cost)
    return best


def lp_brute(c, A_ub, b_ub):
    """Max cᵀx over {A x ≤ b, x ≥ 0} by enumerating vertices with exact arithmetic (tiny sizes)."""
    m, n = len(A_ub), len(c)
    rows = [[Fraction(a) for a in r] for r in A_ub] + [[Fraction(int(i == j)) * -1 for j in range(n)] for i in range(n)]
    rhs = [Fraction(b) for b in b_ub] + [Fraction(0)] * n
    best = None
    for idx in itertools.combinations(range(m + n), n):
        M = [rows[i][:] + [rhs[i]] for i in idx]
        ok = True
        for col in range(n):
            piv = next((r for r in range(col, n) if M[r][col] != 0), None)
            if piv is None:
                ok = False
                break
            M[col], M[piv] = M[piv], M[col]
            for r in range(n):
                if r != col and M[r][col] != 0:
                    fac = M[r][col] / M[col][col]
                    M[r] = [a - fac * b for a, b in zip(M[r], M[col])]
        if not ok:
            continue
        x = [M[i][n] / M[i][i] for i in range(n)]
        if all(sum(r[j] * x[j] for j in range(n)) <= b for r, b in zip(rows, rhs)):
            val = sum(Fraction(ci) * xi for ci, xi in zip(c, x))
            if best is None or val > best:
                best = val
    return best
