"""Weighted graphs, digraphs and hypergraphs with cut functionals and cover lifts.

Vertices are dense integers ``0..n-1``.  Vertex sets are accepted as any
iterable of integers or as boolean masks of length ``n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence, TextIO

import numpy as np
import scipy.sparse as sp


class DomainError(ValueError):
    """An input lies outside the domain of an operation."""


class ParseError(ValueError):
    """A malformed line in an edge-list file."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def as_mask(S, n: int) -> np.ndarray:
    """Boolean membership mask for a vertex set."""
    if isinstance(S, np.ndarray) and S.dtype == bool:
        if S.shape != (n,):
            raise DomainError(f"mask has shape {S.shape}, expected ({n},)")
        return S
    idx = np.fromiter((int(v) for v in S), dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise DomainError("vertex id out of range")
    mask = np.zeros(n, dtype=bool)
    mask[idx] = True
    return mask


def _merge(keys: np.ndarray, w: np.ndarray):
    """Sum weights of rows with identical keys; rows come back sorted."""
    if keys.shape[0] == 0:
        return keys, w
    uniq, inv = np.unique(keys, axis=0, return_inverse=True)
    summed = np.zeros(uniq.shape[0])
    np.add.at(summed, inv.ravel(), w)
    return uniq, summed


def _edge_arrays(edges, n: int):
    rows = [tuple(e) for e in edges]
    if not rows:
        return np.zeros((0, 2), dtype=np.int64), np.zeros(0)
    uv = np.array([(int(r[0]), int(r[1])) for r in rows], dtype=np.int64)
    w = np.array([float(r[2]) if len(r) > 2 else 1.0 for r in rows])
    if uv.min() < 0 or uv.max() >= n:
        raise DomainError("vertex id out of range")
    if np.any(uv[:, 0] == uv[:, 1]):
        raise DomainError("self-loops are not allowed")
    if np.any(~(w > 0)) or not np.all(np.isfinite(w)):
        raise DomainError("edge weights must be positive and finite")
    return uv, w


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected weighted graph without self-loops.

    Edges are stored once with ``src < dst``; duplicates are merged by
    summing their weights.
    """

    n: int
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray

    def __post_init__(self):
        uv = np.stack([np.asarray(self.src, dtype=np.int64), np.asarray(self.dst, dtype=np.int64)], axis=1)
        w = np.asarray(self.weight, dtype=float)
        if uv.shape[0]:
            if uv.min() < 0 or uv.max() >= self.n:
                raise DomainError("vertex id out of range")
            if np.any(uv[:, 0] == uv[:, 1]):
                raise DomainError("self-loops are not allowed")
            if np.any(~(w > 0)) or not np.all(np.isfinite(w)):
                raise DomainError("edge weights must be positive and finite")
        uv = np.sort(uv, axis=1)
        uv, w = _merge(uv, w)
        object.__setattr__(self, "src", uv[:, 0].copy())
        object.__setattr__(self, "dst", uv[:, 1].copy())
        object.__setattr__(self, "weight", w)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence]) -> "Graph":
        uv, w = _edge_arrays(edges, n)
        return cls(n, uv[:, 0], uv[:, 1], w)

    @property
    def m(self) -> int:
        return int(self.src.shape[0])

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        return [(int(u), int(v), float(w)) for u, v, w in zip(self.src, self.dst, self.weight)]

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        rows = np.concatenate([self.src, self.dst])
        cols = np.concatenate([self.dst, self.src])
        data = np.concatenate([self.weight, self.weight])
        return sp.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    @cached_property
    def degree(self) -> np.ndarray:
        deg = np.zeros(self.n)
        np.add.at(deg, self.src, self.weight)
        np.add.at(deg, self.dst, self.weight)
        return deg

    @cached_property
    def total_volume(self) -> float:
        return float(self.degree.sum())

    def neighbors(self, u: int) -> tuple[np.ndarray, np.ndarray]:
        A = self.adjacency
        lo, hi = A.indptr[u], A.indptr[u + 1]
        return A.indices[lo:hi], A.data[lo:hi]

    def vol(self, S) -> float:
        return float(self.degree[as_mask(S, self.n)].sum())

    def scaled(self, c: float) -> "Graph":
        return Graph(self.n, self.src, self.dst, self.weight * c)

    def subgraph_components(self) -> np.ndarray:
        """Connected-component label of every vertex."""
        from scipy.sparse.csgraph import connected_components

        return connected_components(self.adjacency, directed=False)[1]


@dataclass(frozen=True, eq=False)
class Digraph:
    """Directed weighted graph; parallel arcs are merged, antiparallel arcs kept."""

    n: int
    tail: np.ndarray
    head: np.ndarray
    weight: np.ndarray

    def __post_init__(self):
        uv = np.stack([np.asarray(self.tail, dtype=np.int64), np.asarray(self.head, dtype=np.int64)], axis=1)
        w = np.asarray(self.weight, dtype=float)
        if uv.shape[0]:
            if uv.min() < 0 or uv.max() >= self.n:
                raise DomainError("vertex id out of range")
            if np.any(uv[:, 0] == uv[:, 1]):
                raise DomainError("self-loops are not allowed")
            if np.any(~(w > 0)) or not np.all(np.isfinite(w)):
                raise DomainError("arc weights must be positive and finite")
        uv, w = _merge(uv, w)
        object.__setattr__(self, "tail", uv[:, 0].copy())
        object.__setattr__(self, "head", uv[:, 1].copy())
        object.__setattr__(self, "weight", w)

    @classmethod
    def from_arcs(cls, n: int, arcs: Iterable[Sequence]) -> "Digraph":
        uv, w = _edge_arrays(arcs, n)
        return cls(n, uv[:, 0], uv[:, 1], w)

    @property
    def m(self) -> int:
        return int(self.tail.shape[0])

    @property
    def arcs(self) -> list[tuple[int, int, float]]:
        return [(int(u), int(v), float(w)) for u, v, w in zip(self.tail, self.head, self.weight)]

    @cached_property
    def out_degree(self) -> np.ndarray:
        deg = np.zeros(self.n)
        np.add.at(deg, self.tail, self.weight)
        return deg

    @cached_property
    def in_degree(self) -> np.ndarray:
        deg = np.zeros(self.n)
        np.add.at(deg, self.head, self.weight)
        return deg

    def vol_out(self, S) -> float:
        return float(self.out_degree[as_mask(S, self.n)].sum())

    def vol_in(self, S) -> float:
        return float(self.in_degree[as_mask(S, self.n)].sum())

    def scaled(self, c: float) -> "Digraph":
        return Digraph(self.n, self.tail, self.head, self.weight * c)


@dataclass(frozen=True, eq=False)
class Hypergraph:
    """Weighted hypergraph; every edge has at least two distinct members.

    Edges with identical member sets are merged by summing weights.
    """

    n: int
    edges: tuple[tuple[int, ...], ...]
    weight: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weight, dtype=float)
        if len(self.edges) != w.shape[0]:
            raise DomainError("one weight per edge required")
        merged: dict[tuple[int, ...], float] = {}
        for e, we in zip(self.edges, w):
            members = tuple(sorted(int(v) for v in e))
            if len(members) < 2:
                raise DomainError("edges need rank at least 2")
            if len(set(members)) != len(members):
                raise DomainError("duplicate member in edge")
            if members[0] < 0 or members[-1] >= self.n:
                raise DomainError("vertex id out of range")
            if not (we > 0 and np.isfinite(we)):
                raise DomainError("edge weights must be positive and finite")
            merged[members] = merged.get(members, 0.0) + float(we)
        keys = sorted(merged)
        object.__setattr__(self, "edges", tuple(keys))
        object.__setattr__(self, "weight", np.array([merged[k] for k in keys]))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], weights=None) -> "Hypergraph":
        edges = [tuple(e) for e in edges]
        if weights is None:
            weights = np.ones(len(edges))
        return cls(n, tuple(edges), np.asarray(weights, dtype=float))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def rank(self) -> np.ndarray:
        return np.array([len(e) for e in self.edges], dtype=np.int64)

    @cached_property
    def ptr(self) -> np.ndarray:
        """Offsets of each edge's members inside :attr:`members`."""
        return np.concatenate([[0], np.cumsum(self.rank)]).astype(np.int64)

    @cached_property
    def members(self) -> np.ndarray:
        if not self.edges:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate([np.asarray(e, dtype=np.int64) for e in self.edges])

    @cached_property
    def edge_of_member(self) -> np.ndarray:
        return np.repeat(np.arange(self.m), self.rank)

    @cached_property
    def incidence(self) -> sp.csr_matrix:
        """Edge-by-vertex 0/1 incidence matrix."""
        data = np.ones(self.members.shape[0])
        return sp.csr_matrix((data, self.members, self.ptr), shape=(self.m, self.n))

    @cached_property
    def degree(self) -> np.ndarray:
        deg = np.zeros(self.n)
        np.add.at(deg, self.members, np.repeat(self.weight, self.rank))
        return deg

    def vol(self, S) -> float:
        return float(self.degree[as_mask(S, self.n)].sum())

    def edge_max(self, f: np.ndarray) -> np.ndarray:
        if self.m == 0:
            return np.zeros(0)
        return np.maximum.reduceat(f[self.members], self.ptr[:-1])

    def edge_min(self, f: np.ndarray) -> np.ndarray:
        if self.m == 0:
            return np.zeros(0)
        return np.minimum.reduceat(f[self.members], self.ptr[:-1])

    def scaled(self, c: float) -> "Hypergraph":
        return Hypergraph(self.n, self.edges, self.weight * c)


@dataclass(frozen=True)
class BipartitePair:
    """Two disjoint vertex sets with optional cached quality scores."""

    L: frozenset
    R: frozenset
    metrics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "L", frozenset(int(v) for v in self.L))
        object.__setattr__(self, "R", frozenset(int(v) for v in self.R))
        if self.L & self.R:
            raise DomainError("L and R must be disjoint")
        if self.metrics and not (self.L or self.R):
            raise DomainError("metrics cached on an empty pair")

    @property
    def empty(self) -> bool:
        return not (self.L or self.R)

    def as_dict(self) -> dict:
        out = {"L": sorted(self.L), "R": sorted(self.R)}
        out.update(self.metrics)
        return out


# ---------------------------------------------------------------------------
# Functionals


def _pair_masks(n: int, L, R) -> tuple[np.ndarray, np.ndarray]:
    Lm, Rm = as_mask(L, n), as_mask(R, n)
    if np.any(Lm & Rm):
        raise DomainError("L and R overlap")
    if not np.any(Lm | Rm):
        raise DomainError("L and R are both empty")
    return Lm, Rm


def cut_weight_graph(g: Graph, S) -> float:
    """Total weight of edges leaving S."""
    mask = as_mask(S, g.n)
    return float(g.weight[mask[g.src] != mask[g.dst]].sum())


def conductance(g: Graph, S) -> float:
    """w(S, S̄) / min(vol S, vol S̄)."""
    mask = as_mask(S, g.n)
    k = int(mask.sum())
    if k == 0 or k == g.n:
        raise DomainError("S must be a nonempty proper subset")
    vol_s = float(g.degree[mask].sum())
    denom = min(vol_s, g.total_volume - vol_s)
    if denom <= 0:
        raise DomainError("S or its complement has zero volume")
    return cut_weight_graph(g, mask) / denom


def bipartiteness(g: Graph, L, R) -> float:
    """1 - 2 w(L, R) / vol(L ∪ R)."""
    Lm, Rm = _pair_masks(g.n, L, R)
    vol = float(g.degree[Lm | Rm].sum())
    if vol <= 0:
        raise DomainError("L ∪ R has zero volume")
    cross = (Lm[g.src] & Rm[g.dst]) | (Rm[g.src] & Lm[g.dst])
    return 1.0 - 2.0 * float(g.weight[cross].sum()) / vol


def flow_ratio(d: Digraph, L, R) -> float:
    """1 - 2 w(L → R) / (vol_out(L) + vol_in(R))."""
    Lm, Rm = as_mask(L, d.n), as_mask(R, d.n)
    if np.any(Lm & Rm):
        raise DomainError("L and R overlap")
    denom = float(d.out_degree[Lm].sum() + d.in_degree[Rm].sum())
    if denom <= 0:
        raise DomainError("vol_out(L) + vol_in(R) is zero")
    forward = float(d.weight[Lm[d.tail] & Rm[d.head]].sum())
    return 1.0 - 2.0 * forward / denom


def cut_imbalance(d: Digraph, L, R) -> float:
    """Half the normalised difference between the two cut directions."""
    Lm, Rm = as_mask(L, d.n), as_mask(R, d.n)
    if np.any(Lm & Rm):
        raise DomainError("L and R overlap")
    lr = float(d.weight[Lm[d.tail] & Rm[d.head]].sum())
    rl = float(d.weight[Rm[d.tail] & Lm[d.head]].sum())
    if lr + rl <= 0:
        raise DomainError("no arcs between L and R")
    return 0.5 * abs((lr - rl) / (lr + rl))


def _hits(h: Hypergraph, mask: np.ndarray) -> np.ndarray:
    """Number of members of each edge inside ``mask``."""
    if h.m == 0:
        return np.zeros(0, dtype=np.int64)
    return np.add.reduceat(mask[h.members].astype(np.int64), h.ptr[:-1])


def restricted_weight(h: Hypergraph, A, B, C=()) -> float:
    """Weight of edges meeting both A and B while avoiding C."""
    a = _hits(h, as_mask(A, h.n)) > 0
    b = _hits(h, as_mask(B, h.n)) > 0
    c = _hits(h, as_mask(C, h.n)) > 0
    return float(h.weight[a & b & ~c].sum())


def cut_weight(h: Hypergraph, A, B) -> float:
    """Weight of edges meeting both A and B."""
    return restricted_weight(h, A, B, ())


def hyper_bipartiteness(h: Hypergraph, L, R) -> float:
    """Hypergraph bipartiteness of the pair (L, R).

    Edges inside one side are charged twice; edges touching exactly one side
    and the exterior are charged once; edges meeting both sides are free.
    """
    Lm, Rm = _pair_masks(h.n, L, R)
    vol = float(h.degree[Lm | Rm].sum())
    if vol <= 0:
        raise DomainError("L ∪ R has zero volume")
    a, b, r = _hits(h, Lm), _hits(h, Rm), h.rank
    charge = np.where(a == r, 2.0, 0.0) + np.where(b == r, 2.0, 0.0)
    charge += np.where((a > 0) & (a < r) & (b == 0), 1.0, 0.0)
    charge += np.where((b > 0) & (b < r) & (a == 0), 1.0, 0.0)
    return float(h.weight @ charge) / vol


# ---------------------------------------------------------------------------
# Cover lifts.  Copy 1 of vertex v is v, copy 2 is v + n.


def double_cover(g: Graph) -> Graph:
    """Bipartite lift where {u, v} becomes {u₁, v₂} and {u₂, v₁}."""
    n = g.n
    src = np.concatenate([g.src, g.dst])
    dst = np.concatenate([g.dst + n, g.src + n])
    return Graph(2 * n, src, dst, np.concatenate([g.weight, g.weight]))


def semi_double_cover(d: Digraph) -> Graph:
    """Lift where each arc (u, v) becomes the single edge {u₁, v₂}."""
    return Graph(2 * d.n, d.tail, d.head + d.n, d.weight)


def cover_set(L, R, n: int) -> np.ndarray:
    """Mask of L₁ ∪ R₂ on a 2n-vertex cover."""
    Lm, Rm = as_mask(L, n), as_mask(R, n)
    return np.concatenate([Lm, Rm])


def split_cover_set(S, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Vertices whose first copy is in S and those whose second copy is."""
    mask = as_mask(S, 2 * n)
    return mask[:n].copy(), mask[n:].copy()


def is_simple(S, n: int) -> bool:
    one, two = split_cover_set(S, n)
    return not np.any(one & two)


# ---------------------------------------------------------------------------
# Edge-list files


def _tokens(lines: Iterable[str]):
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line.split()


def _weight(tok: str, lineno: int) -> float:
    try:
        w = float(tok)
    except ValueError:
        raise ParseError(lineno, f"bad weight {tok!r}") from None
    if not (w > 0 and np.isfinite(w)):
        raise ParseError(lineno, f"weight must be positive, got {tok!r}")
    return w


def _pairs(lines: Iterable[str], what: str):
    labels: dict[str, int] = {}
    rows = []
    for lineno, toks in _tokens(lines):
        if len(toks) not in (2, 3):
            raise ParseError(lineno, f"expected '{what}' with optional weight")
        a, b = toks[0], toks[1]
        if a == b:
            raise ParseError(lineno, f"self-loop on {a!r}")
        w = _weight(toks[2], lineno) if len(toks) == 3 else 1.0
        u = labels.setdefault(a, len(labels))
        v = labels.setdefault(b, len(labels))
        rows.append((u, v, w))
    return rows, list(labels)


def parse_graph(lines: Iterable[str]) -> tuple[Graph, list[str]]:
    rows, labels = _pairs(lines, "u v")
    return Graph.from_edges(len(labels), rows), labels


def parse_digraph(lines: Iterable[str]) -> tuple[Digraph, list[str]]:
    rows, labels = _pairs(lines, "tail head")
    return Digraph.from_arcs(len(labels), rows), labels


def parse_hypergraph(lines: Iterable[str]) -> tuple[Hypergraph, list[str]]:
    labels: dict[str, int] = {}
    edges, weights = [], []
    for lineno, toks in _tokens(lines):
        if len(toks) < 3:
            raise ParseError(lineno, "expected 'w v1 v2 ...' with at least two members")
        w = _weight(toks[0], lineno)
        if len(set(toks[1:])) != len(toks) - 1:
            raise ParseError(lineno, "repeated member in edge")
        edges.append(tuple(labels.setdefault(t, len(labels)) for t in toks[1:]))
        weights.append(w)
    return Hypergraph.from_edges(len(labels), edges, weights), list(labels)


def _open_lines(path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return fh.readlines()


def read_graph(path) -> tuple[Graph, list[str]]:
    return parse_graph(_open_lines(path))


def read_digraph(path) -> tuple[Digraph, list[str]]:
    return parse_digraph(_open_lines(path))


def read_hypergraph(path) -> tuple[Hypergraph, list[str]]:
    return parse_hypergraph(_open_lines(path))


def _label(labels, v: int) -> str:
    return str(v) if labels is None else str(labels[v])


def write_graph(g: Graph | Digraph, fh: TextIO, labels=None) -> None:
    if isinstance(g, Digraph):
        rows = zip(g.tail, g.head, g.weight)
    else:
        rows = zip(g.src, g.dst, g.weight)
    for u, v, w in rows:
        fh.write(f"{_label(labels, u)} {_label(labels, v)} {float(w)!r}\n")


def write_hypergraph(h: Hypergraph, fh: TextIO, labels=None) -> None:
    for e, w in zip(h.edges, h.weight):
        fh.write(f"{float(w)!r} " + " ".join(_label(labels, v) for v in e) + "\n")
