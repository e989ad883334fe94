"""Signless-Laplacian diffusion on hypergraphs and the two-sided sweep it feeds.

For a vector f every edge e has a discrepancy Δ(e) = max_e f + min_e f.
The members attaining the maximum form S(e) and those attaining the minimum
form I(e).  The rate r = df/dt is the unique vector for which each edge
pushes exactly −w(e)Δ(e) of degree-weighted rate into S(e) and the same into
I(e), with the rate concentrated on the members whose r is extreme.  It is
found class by class (vertices of equal f) by a linear program that picks
the set P of largest common rate, then recursing on the rest.

An edge whose members all share one value has S(e) = I(e) = e; it acts
once through its S role and once through its I role.  On a graph this gives
r = −D⁻¹(D + A)f exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx
import numpy as np
from scipy.optimize import linprog

from densekit.graph import BipartitePair, DomainError, Graph, Hypergraph, hyper_bipartiteness
from densekit.lp import solve_lp
from densekit.spectral import LaplacianKind, smallest_eigs, two_sided_groups, two_sided_pair

EXACT_LIMIT = 64
ROUND_DIGITS = 12


class RateError(RuntimeError):
    """The rate LP could not be solved for some equivalence class."""


# ---------------------------------------------------------------------------
# Discrepancies


def snap(f: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Round f to 12 decimals relative to max|f|; returns (snapped f, class keys)."""
    f = np.asarray(f, dtype=float)
    if not np.all(np.isfinite(f)):
        raise DomainError("f must be finite")
    scale = float(np.max(np.abs(f))) if f.size else 0.0
    if scale == 0.0:
        return np.zeros_like(f), np.zeros_like(f)
    key = np.round(f / scale, ROUND_DIGITS)
    return key * scale, key


def discrepancy(h: Hypergraph, f: np.ndarray) -> np.ndarray:
    """Δ(e) = max_e f + min_e f for every edge."""
    return h.edge_max(f) + h.edge_min(f)


def quadratic_form(h: Hypergraph, f: np.ndarray) -> float:
    """fᵀJ_H f = Σ_e w(e)Δ(e)²."""
    d = discrepancy(h, np.asarray(f, dtype=float))
    return float(h.weight @ (d * d))


def rayleigh_quotient(h: Hypergraph, f: np.ndarray) -> float:
    f = np.asarray(f, dtype=float)
    den = float(h.degree @ (f * f))
    if den <= 0:
        raise DomainError("f vanishes on every vertex of positive degree")
    return quadratic_form(h, f) / den


def extreme_sets(h: Hypergraph, key: np.ndarray) -> tuple[list[tuple], list[tuple]]:
    """S(e) and I(e) for every edge under class keys."""
    hi, lo = h.edge_max(key), h.edge_min(key)
    S, I = [], []
    for e, members in enumerate(h.edges):
        S.append(tuple(v for v in members if key[v] == hi[e]))
        I.append(tuple(v for v in members if key[v] == lo[e]))
    return S, I


# ---------------------------------------------------------------------------
# Rate plan


@dataclass(frozen=True)
class Role:
    """One side of one edge acting on an equivalence class."""

    edge: int
    side: str  # "S" or "I"
    members: tuple
    c: float  # w(e)|Δ(e)|
    negative: bool  # Δ(e) < 0, so the role feeds positive rate

    @property
    def kind(self) -> str:
        return self.side + ("+" if self.negative else "-")

    @property
    def sign(self) -> int:
        return 1 if self.negative else -1

    def counts_for(self, P: frozenset) -> bool:
        """Whether this role is settled when P takes the current largest rate."""
        if self.kind == "S-":
            return any(v in P for v in self.members)
        return all(v in P for v in self.members)

    def restrict(self, U: frozenset) -> "Role":
        return Role(self.edge, self.side, tuple(v for v in self.members if v in U), self.c, self.negative)


@dataclass
class Level:
    """Vertices P of one class receiving the common rate delta, and the roles settled with them."""

    cls: tuple
    P: tuple
    delta: float
    roles: list[Role]
    lp_value: float | None = None


@dataclass
class RatePlan:
    r: np.ndarray
    levels: list[Level]
    delta_edge: np.ndarray
    S: list[tuple]
    I: list[tuple]
    f: np.ndarray
    role_contrib: dict = field(default_factory=dict)
    """(edge, side, vertex) → r_e(v) contributed through that role."""

    @property
    def edge_contrib(self) -> dict:
        out: dict = {}
        for (e, _side, v), val in self.role_contrib.items():
            out[(e, v)] = out.get((e, v), 0.0) + val
        return out


def _role_components(U: list[int], roles: list[Role]) -> list[tuple[list[int], list[Role]]]:
    """Split a class into groups of vertices coupled through multi-member roles."""
    parent = {v: v for v in U}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for role in roles:
        first = role.members[0]
        for v in role.members[1:]:
            a, b = find(first), find(v)
            if a != b:
                parent[a] = b
    groups: dict[int, list[int]] = {}
    for v in U:
        groups.setdefault(find(v), []).append(v)
    by_root: dict[int, list[Role]] = {}
    for role in roles:
        by_root.setdefault(find(role.members[0]), []).append(role)
    return [(vs, by_root.get(root, [])) for root, vs in groups.items()]


def _lp_rows(U: list[int], roles: list[Role]):
    """Role constraints over variables (x_roles, y_U) as (A_ub, A_eq) row lists."""
    nr, nu = len(roles), len(U)
    col = {v: nr + i for i, v in enumerate(U)}
    ub, eq = [], []
    for k, role in enumerate(roles):
        for v in role.members:
            row = [0] * (nr + nu)
            if role.kind in ("S+", "I-"):
                row[k], row[col[v]] = 1, -1
                eq.append(row)
            elif role.kind == "I+":
                row[k], row[col[v]] = 1, -1
                ub.append(row)
            else:  # S-: x ≥ y
                row[k], row[col[v]] = -1, 1
                ub.append(row)
    return ub, eq


def _support_exact(U, roles, deg, pivot_rule):
    nr, nu = len(roles), len(U)
    cost = [Fraction(r.sign) * Fraction(r.c) for r in roles]
    degs = [Fraction(float(deg[v])) for v in U]
    ub, eq = _lp_rows(U, roles)
    norm = [0] * nr + degs
    res = solve_lp(cost + [0] * nu, ub, [0] * len(ub), eq + [norm], [0] * len(eq) + [1], pivot_rule=pivot_rule)
    if res.status != "optimal":
        raise RateError(f"rate LP {res.status} on class of size {nu}")
    best = res.value
    # Largest support among optimal solutions: homogenise and maximise Σ t with t ≤ y, t ≤ 1.
    width = nr + 2 * nu
    ub2 = [row + [0] * nu for row in ub]
    eq2 = [row + [0] * nu for row in eq]
    ub2.append([-c for c in cost] + [best * d for d in degs] + [0] * nu)
    for i in range(nu):
        row = [0] * width
        row[nr + nu + i], row[nr + i] = 1, -1
        ub2.append(row)
        row = [0] * width
        row[nr + nu + i] = 1
        ub2.append(row)
    rhs = [0] * len(ub2)
    for i in range(nu):
        rhs[len(ub) + 1 + 2 * i + 1] = 1
    res2 = solve_lp([0] * (nr + nu) + [1] * nu, ub2, rhs, eq2, [0] * len(eq2), pivot_rule=pivot_rule)
    if res2.status != "optimal":
        raise RateError(f"support LP {res2.status} on class of size {nu}")
    P = frozenset(v for i, v in enumerate(U) if res2.x[nr + nu + i] == 1)
    return P, float(best)


def _support_float(U, roles, deg):
    nr, nu = len(roles), len(U)
    cost = np.array([r.sign * r.c for r in roles])
    degs = np.array([deg[v] for v in U], dtype=float)
    ub, eq = _lp_rows(U, roles)
    A_ub = np.array(ub, dtype=float).reshape(-1, nr + nu)
    A_eq = np.vstack([np.array(eq, dtype=float).reshape(-1, nr + nu), np.r_[np.zeros(nr), degs]])
    b_eq = np.r_[np.zeros(A_eq.shape[0] - 1), 1.0]
    res = linprog(-np.r_[cost, np.zeros(nu)], A_ub=A_ub if A_ub.size else None,
                  b_ub=np.zeros(A_ub.shape[0]) if A_ub.size else None, A_eq=A_eq, b_eq=b_eq, method="highs")
    if res.status != 0:
        raise RateError(f"rate LP failed on class of size {nu}: {res.message}")
    best = -res.fun
    width = nr + 2 * nu
    pad = lambda M: np.hstack([M, np.zeros((M.shape[0], nu))])
    rows = [pad(A_ub)] if A_ub.size else []
    rows.append(np.r_[-cost, best * degs, np.zeros(nu)][None, :])
    link = np.zeros((nu, width))
    link[np.arange(nu), nr + nu + np.arange(nu)] = 1
    link[np.arange(nu), nr + np.arange(nu)] = -1
    rows.append(link)
    A2 = np.vstack(rows)
    # Slack on the optimality row absorbs solver round-off.
    b2 = np.zeros(A2.shape[0])
    b2[(A_ub.shape[0] if A_ub.size else 0)] = 1e-9 * max(1.0, abs(best))
    bounds = [(0, None)] * (nr + nu) + [(0, 1)] * nu
    Aeq2 = np.hstack([A_eq[:-1], np.zeros((A_eq.shape[0] - 1, nu))]) if A_eq.shape[0] > 1 else None
    res2 = linprog(-np.r_[np.zeros(nr + nu), np.ones(nu)], A_ub=A2, b_ub=b2, A_eq=Aeq2,
                   b_eq=np.zeros(Aeq2.shape[0]) if Aeq2 is not None else None, bounds=bounds, method="highs")
    if res2.status != 0:
        raise RateError(f"support LP failed on class of size {nu}: {res2.message}")
    t = res2.x[nr + nu:]
    return frozenset(v for i, v in enumerate(U) if t[i] > 0.5), best


def _settle(U: list[int], roles: list[Role], deg, exact: bool | None, pivot_rule: str) -> list[Level]:
    """Recursive assignment of rates inside one coupled group of a class."""
    levels = []
    U = list(U)
    cls = tuple(U)
    while U:
        if len(U) == 1 or all(len(r.members) == 1 for r in roles):
            # Decoupled vertices: each rate is its own net inflow per unit degree.
            net = {v: 0.0 for v in U}
            for role in roles:
                net[role.members[0]] += role.sign * role.c
            rates = {v: net[v] / deg[v] for v in U}
            top = max(rates.values())
            P = frozenset(v for v in U if rates[v] == top)
            lp_value = top
        else:
            use_exact = exact if exact is not None else len(U) <= EXACT_LIMIT
            if use_exact:
                P, lp_value = _support_exact(U, roles, deg, pivot_rule)
            else:
                P, lp_value = _support_float(U, roles, deg)
            if not P:
                raise RateError("empty optimal support")
        settled = [r for r in roles if r.counts_for(P)]
        vol = float(sum(deg[v] for v in P))
        delta = sum(r.sign * r.c for r in settled) / vol
        levels.append(Level(cls=cls, P=tuple(sorted(P)), delta=delta, roles=settled, lp_value=lp_value))
        rest = frozenset(U) - P
        roles = [r.restrict(rest) for r in roles if not r.counts_for(P)]
        roles = [r for r in roles if r.members]
        U = [v for v in U if v in rest]
    return levels


def _singleton_contrib(level: Level, deg) -> dict:
    (v,) = level.P
    return {(r.edge, r.side, v): r.sign * r.c / deg[v] for r in level.roles if v in r.members}


def level_flow(level: Level, deg) -> tuple[float, float, dict]:
    """Max-flow certificate for one level.

    Edge roles feeding positive rate take their weight from the source and
    roles draining rate send it to the sink; each vertex of P absorbs (or
    emits) deg(v)|δ|.  Returns (flow value, capacity of the source cut,
    role contributions r_e(v)).
    """
    G = nx.DiGraph()
    cut = 0.0
    P = set(level.P)
    for k, role in enumerate(level.roles):
        node = ("e", k)
        if role.negative:
            G.add_edge("s", node, capacity=role.c)
            cut += role.c
        else:
            G.add_edge(node, "t", capacity=role.c)
        for v in role.members:
            if v in P:
                G.add_edge(node, ("v", v))
                G.add_edge(("v", v), node)
    for v in level.P:
        amount = deg[v] * abs(level.delta)
        if level.delta >= 0:
            G.add_edge(("v", v), "t", capacity=amount)
        else:
            G.add_edge("s", ("v", v), capacity=amount)
            cut += amount
    G.add_node("s")
    G.add_node("t")
    value, flow = nx.maximum_flow(G, "s", "t")
    contrib = {}
    for k, role in enumerate(level.roles):
        node = ("e", k)
        for v in (u for u in role.members if u in P):
            net = flow[node].get(("v", v), 0.0) - flow[("v", v)].get(node, 0.0)
            contrib[(role.edge, role.side, v)] = net / deg[v]
    return float(value), cut, contrib


def compute_change_rate(h: Hypergraph, f: np.ndarray, exact: bool | None = None,
                        pivot_rule: str = "bland", contributions: bool = True) -> RatePlan:
    """Rate r = df/dt of the diffusion at f together with its per-class levels.

    ``exact`` forces the rational (True) or floating (False) LP; by default
    groups of at most 64 coupled vertices are solved exactly.
    """
    fs, key = snap(f)
    delta_e = discrepancy(h, fs)
    S, I = extreme_sets(h, key)
    deg = h.degree
    by_class: dict[float, list[Role]] = {}
    for e in range(h.m):
        if delta_e[e] == 0:
            continue
        c = float(h.weight[e] * abs(delta_e[e]))
        neg = bool(delta_e[e] < 0)
        for side, members in (("S", S[e]), ("I", I[e])):
            by_class.setdefault(float(key[members[0]]), []).append(Role(e, side, members, c, neg))
    r = np.zeros(h.n)
    levels: list[Level] = []
    active = np.flatnonzero(deg > 0)
    classes: dict[float, list[int]] = {}
    for v in active:
        classes.setdefault(float(key[v]), []).append(int(v))
    for k, U in classes.items():
        for group, roles in _role_components(U, by_class.get(k, [])):
            for level in _settle(group, roles, deg, exact, pivot_rule):
                levels.append(level)
                r[list(level.P)] = level.delta
    plan = RatePlan(r=r, levels=levels, delta_edge=delta_e, S=S, I=I, f=fs)
    if contributions:
        for level in levels:
            if not level.roles:
                continue
            if len(level.P) == 1:
                plan.role_contrib.update(_singleton_contrib(level, deg))
            else:
                plan.role_contrib.update(level_flow(level, deg)[2])
    return plan


@dataclass
class VerifyReport:
    ok: bool
    max_flow_gap: float
    max_rule1_error: float
    rule2_violations: int
    details: list = field(default_factory=list)


def verify_rate_plan(h: Hypergraph, f: np.ndarray, plan: RatePlan, tol: float = 1e-9) -> VerifyReport:
    """Certify a plan: every level's flow network saturates its source cut and both rules hold."""
    deg = h.degree
    gap = 0.0
    contrib: dict = {}
    details = []
    for level in plan.levels:
        if not level.roles and abs(level.delta) <= tol:
            continue
        value, cut, c = level_flow(level, deg)
        g = cut - value
        gap = max(gap, g / max(1.0, cut))
        if g > tol * max(1.0, cut):
            details.append(("unsaturated", level.cls, level.P, value, cut))
        contrib.update(c)
    # Rule (1): each role moves exactly −w(e)Δ(e) of degree-weighted rate.
    err = 0.0
    for e in range(h.m):
        target = -h.weight[e] * plan.delta_edge[e]
        for side, members in (("S", plan.S[e]), ("I", plan.I[e])):
            got = sum(deg[v] * contrib.get((e, side, v), 0.0) for v in members)
            if plan.delta_edge[e] == 0:
                target_side = 0.0
            else:
                target_side = target
            err = max(err, abs(got - target_side) / max(1.0, abs(target_side)))
    # Rule (2): rate flows only through extreme-r members; equal r where required.
    viol = 0
    r = plan.r
    scale = max(1.0, float(np.max(np.abs(r)))) if r.size else 1.0
    for (e, side, v), val in contrib.items():
        if abs(val) <= tol:
            continue
        members = plan.S[e] if side == "S" else plan.I[e]
        rs = [r[u] for u in members]
        neg = plan.delta_edge[e] < 0
        if (side == "S") == (not neg):
            extreme = max(rs) if side == "S" else min(rs)
            if abs(r[v] - extreme) > tol * scale:
                viol += 1
        elif max(rs) - min(rs) > tol * scale:
            viol += 1
    ok = not details and err <= tol and viol == 0
    return VerifyReport(ok=ok, max_flow_gap=gap, max_rule1_error=err, rule2_violations=viol, details=details)


def rate_norm_sides(h: Hypergraph, plan: RatePlan) -> tuple[float, float]:
    """(‖r‖²_w, −Σ_e w(e)Δ(e)(r_e^S + r_e^I)) for the rate-norm identity."""
    r = plan.r
    lhs = float(h.degree @ (r * r))
    rhs = 0.0
    for e in range(h.m):
        d = plan.delta_edge[e]
        if d == 0:
            continue
        rS = max(r[v] for v in plan.S[e]) if d > 0 else r[plan.S[e][0]]
        rI = min(r[v] for v in plan.I[e]) if d < 0 else r[plan.I[e][0]]
        rhs -= h.weight[e] * d * (rS + rI)
    return lhs, rhs


# ---------------------------------------------------------------------------
# Even-split approximation


def even_split_rate(h: Hypergraph, f: np.ndarray) -> np.ndarray:
    """Rate when each w(e) is spread evenly over S(e) × I(e)."""
    fs, key = snap(f)
    delta_e = discrepancy(h, fs)
    S, I = extreme_sets(h, key)
    push = np.zeros(h.n)
    for e in range(h.m):
        d = delta_e[e]
        if d == 0:
            continue
        amount = -h.weight[e] * d
        push[list(S[e])] += amount / len(S[e])
        push[list(I[e])] += amount / len(I[e])
    r = np.zeros(h.n)
    nz = h.degree > 0
    r[nz] = push[nz] / h.degree[nz]
    return r


# ---------------------------------------------------------------------------
# Diffusion loop


@dataclass
class DiffusionState:
    f: np.ndarray
    t: float = 0.0
    eps: float = 1.0
    rq_history: list = field(default_factory=list)


def _dnorm(h: Hypergraph, f: np.ndarray) -> float:
    return float(np.sqrt(h.degree @ (f * f)))


def _rate(h: Hypergraph, f: np.ndarray, mode: str) -> np.ndarray:
    if mode in ("lp", "exact", "exact-LP"):
        return compute_change_rate(h, f, contributions=False).r
    if mode in ("approx", "even-split"):
        return even_split_rate(h, f)
    raise DomainError(f"unknown mode {mode!r}")


def _advance(h: Hypergraph, state: DiffusionState, r: np.ndarray, step: float) -> DiffusionState:
    f = state.f + step * r
    norm = _dnorm(h, f)
    if norm == 0:
        raise DomainError("diffusion collapsed to zero")
    f = f / norm
    hist = list(state.rq_history) + [rayleigh_quotient(h, f)]
    return DiffusionState(f=f, t=state.t + step, eps=state.eps, rq_history=hist)


def diffusion_step(h: Hypergraph, state: DiffusionState, mode: str = "lp") -> DiffusionState:
    """f ← f + ε·r, then rescale to unit degree-weighted norm.

    Rescaling does not change the trajectory's direction because r is
    positively homogeneous in f.
    """
    if state.eps <= 0:
        raise DomainError("eps must be positive")
    return _advance(h, state, _rate(h, state.f, mode), state.eps)


def clique_reduction(h: Hypergraph) -> Graph:
    """Each edge becomes a clique with weight w(e)/(rank(e) − 1) per pair; degrees are kept."""
    src, dst, w = [], [], []
    for e, members in enumerate(h.edges):
        k = len(members)
        share = h.weight[e] / (k - 1)
        for i in range(k):
            for j in range(i + 1, k):
                src.append(members[i])
                dst.append(members[j])
                w.append(share)
    return Graph(h.n, np.asarray(src, dtype=np.int64), np.asarray(dst, dtype=np.int64), np.asarray(w))


def random_reduction(h: Hypergraph, rng: np.random.Generator) -> Graph:
    """Each edge becomes one uniformly chosen pair of its members with weight w(e)."""
    src, dst = [], []
    for members in h.edges:
        a, b = rng.choice(len(members), size=2, replace=False)
        src.append(members[a])
        dst.append(members[b])
    return Graph(h.n, np.asarray(src, dtype=np.int64), np.asarray(dst, dtype=np.int64), h.weight.copy())


def clique_start_vector(h: Hypergraph) -> np.ndarray:
    """D^{-1/2}x for the bottom eigenvector x of Z on the clique reduction."""
    g = clique_reduction(h)
    eig = smallest_eigs(g, 1, LaplacianKind.SIGNLESS)
    f = np.zeros(h.n)
    nz = g.degree > 0
    f[nz] = eig.vectors[nz, 0] / np.sqrt(g.degree[nz])
    return f


def two_sided_sweep_hyper(h: Hypergraph, f: np.ndarray) -> BipartitePair:
    """Best pair L_j = {|f| ≥ t, f < 0}, R_j = {|f| ≥ t, f ≥ 0} by hypergraph bipartiteness.

    Ties go to the earlier (smaller-volume) threshold.
    """
    f = np.asarray(f, dtype=float)
    _, group = two_sided_groups(f)
    ng = int(group.max()) + 1
    vol = np.cumsum(np.bincount(group, weights=h.degree, minlength=ng))
    diff = np.zeros(ng + 1)
    if h.m:
        edge = h.edge_of_member
        times = group[h.members]
        on_left = (f[h.members] < 0).astype(np.int64)
        order = np.lexsort((times, edge))
        e_s, t_s, l_s = edge[order], times[order], on_left[order]
        starts = h.ptr[:-1]
        a = np.cumsum(l_s)
        a = a - np.repeat(np.r_[0, a][starts], h.rank)
        k = np.arange(e_s.size) - np.repeat(starts, h.rank) + 1
        b = k - a
        rk = h.rank[e_s]
        charge = (np.where(a == rk, 2.0, 0.0) + np.where(b == rk, 2.0, 0.0)
                  + np.where((a > 0) & (b == 0) & (a < rk), 1.0, 0.0)
                  + np.where((b > 0) & (a == 0) & (b < rk), 1.0, 0.0))
        end = np.r_[t_s[1:], ng]
        last = np.r_[e_s[1:] != e_s[:-1], True]
        end = np.where(last, ng, end)
        w = h.weight[e_s] * charge
        np.add.at(diff, t_s, w)
        np.add.at(diff, end, -w)
    charged = np.cumsum(diff)[:ng]
    with np.errstate(divide="ignore", invalid="ignore"):
        beta = np.where(vol > 0, charged / np.where(vol > 0, vol, 1.0), np.inf)
    if not np.any(np.isfinite(beta)):
        raise DomainError("every sweep pair has zero volume")
    j = int(np.argmin(beta))
    L, R = two_sided_pair(f, group, j)
    return BipartitePair(np.flatnonzero(L), np.flatnonzero(R), {"beta_h": float(beta[j]), "sweep_index": j})


@dataclass
class DiffusionResult:
    lam: float
    f: np.ndarray
    pair: BipartitePair
    iters: int
    converged: bool
    rq_history: list


def find_bipartite_components(h: Hypergraph, f0=None, eps: float = 1.0, convergence_ratio: float = 0.9999,
                              max_iters: int = 1000, mode: str = "lp", patience: int = 5,
                              step_control: bool = True) -> DiffusionResult:
    """Run the diffusion from f0 until the Rayleigh quotient settles, then sweep.

    Convergence means R(f_{t+ε})/R(f_t) ∈ [convergence_ratio, 1] for
    ``patience`` consecutive steps, or R below 1e-12.  With ``step_control``
    a step that would raise R is retried at half the size (down to ε/2²⁰),
    so the history is non-increasing; every iteration starts again from ε.
    The iterate with the smallest Rayleigh quotient is swept and returned.
    """
    if eps <= 0:
        raise DomainError("eps must be positive")
    if f0 is None:
        f0 = clique_start_vector(h)
    f0 = np.where(h.degree > 0, np.asarray(f0, dtype=float), 0.0)
    norm = _dnorm(h, f0)
    if norm == 0:
        raise DomainError("f0 vanishes on every vertex of positive degree")
    state = DiffusionState(f=f0 / norm, eps=eps)
    state.rq_history = [rayleigh_quotient(h, state.f)]
    best_f, best_rq = state.f, state.rq_history[0]
    streak, converged, it = 0, best_rq < 1e-12, 0
    while not converged and it < max_iters:
        prev = state.rq_history[-1]
        r = _rate(h, state.f, mode)
        step = eps
        cand = _advance(h, state, r, step)
        while step_control and cand.rq_history[-1] > prev and step > eps * 2.0**-20:
            step /= 2
            cand = _advance(h, state, r, step)
        state = cand
        it += 1
        cur = state.rq_history[-1]
        if cur < best_rq:
            best_f, best_rq = state.f, cur
        if cur < 1e-12:
            converged = True
            break
        ratio = cur / prev if prev > 0 else 1.0
        streak = streak + 1 if convergence_ratio <= ratio <= 1.0 else 0
        converged = streak >= patience
    pair = two_sided_sweep_hyper(h, best_f)
    pair.metrics["beta_h"] = hyper_bipartiteness(h, pair.L, pair.R)
    return DiffusionResult(lam=best_rq, f=best_f, pair=pair, iters=it, converged=converged,
                           rq_history=state.rq_history)


def clique_cut(h: Hypergraph) -> BipartitePair:
    """Two-sided sweep of the clique-reduction Z eigenvector, scored on H."""
    pair = two_sided_sweep_hyper(h, clique_start_vector(h))
    pair.metrics["beta_h"] = hyper_bipartiteness(h, pair.L, pair.R)
    return pair


# ---------------------------------------------------------------------------
# Worked instance


def clique_pair_instance(n: int) -> tuple[Hypergraph, np.ndarray]:
    """Two rank-2 cliques on n/2 vertices each plus n/3 rank-3 edges, with its fixed vector.

    Every vertex lies in one rank-3 edge.  Half of those edges take one vertex
    from the first clique and two from the second, the others the reverse.
    In each rank-3 edge the lone vertex gets f = 1 and the pair gets −1 and 0.
    The returned vector satisfies r = −(1 − 4/n)f.
    """
    if n % 12:
        raise DomainError("n must be a multiple of 12")
    half = n // 2
    A, B = list(range(half)), list(range(half, n))
    edges = [(u, v) for side in (A, B) for i, u in enumerate(side) for v in side[i + 1:]]
    f = np.zeros(n)
    t = n // 3
    ai, bi = 0, 0
    for j in range(t):
        if j < t // 2:
            lone, pair = A[ai], B[bi:bi + 2]
            ai, bi = ai + 1, bi + 2
        else:
            lone, pair = B[bi], A[ai:ai + 2]
            ai, bi = ai + 2, bi + 1
        f[lone], f[pair[0]], f[pair[1]] = 1.0, -1.0, 0.0
        edges.append((lone, pair[0], pair[1]))
    return Hypergraph.from_edges(n, edges), f
