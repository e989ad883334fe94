"""Local discovery of directed pairs with the evolving set process on the semi-double cover.

Cover vertices follow :func:`densekit.graph.semi_double_cover`: copy 1 of v
is ``v`` and copy 2 is ``v + n``.  The arc (u, v) becomes the edge {u₁, v₂},
so copy 1 carries out-degree and copy 2 carries in-degree.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from densekit.graph import (BipartitePair, Digraph, DomainError, Graph, as_mask, cut_imbalance,
                            flow_ratio, semi_double_cover)


def _rng(rng) -> np.random.Generator:
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


def _as_index(S, n: int) -> np.ndarray:
    return np.flatnonzero(as_mask(S, n))


def hitting_probabilities(g: Graph, S: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One-step lazy-walk probability of entering S, for every vertex where it is positive.

    Returns (vertices, probabilities); the vertices are S ∪ N(S) in
    increasing order.  Work is proportional to vol(S).
    """
    A = g.adjacency
    rows = A[S]
    touched = np.concatenate([S, rows.indices])
    verts, inv = np.unique(touched, return_inverse=True)
    into = np.bincount(inv[S.size:], weights=rows.data, minlength=verts.size)
    deg = g.degree[verts]
    h = np.zeros(verts.size)
    nz = deg > 0
    h[nz] = 0.5 * into[nz] / deg[nz]
    h[inv[: S.size]] += 0.5
    # A zero-degree member of S only ever steps to itself.
    h[inv[: S.size][g.degree[S] == 0]] = 1.0
    return verts, h


@dataclass
class Transitions:
    """Every set reachable in one ESP step from S, with its probability K(S, S′)."""

    sets: list
    probs: np.ndarray
    volumes: np.ndarray

    def volume_biased(self, vol_s: float) -> np.ndarray:
        """K̂(S, S′) = vol(S′)/vol(S)·K(S, S′), renormalised against rounding."""
        w = self.volumes * self.probs / vol_s
        return w / w.sum()


def transitions(g: Graph, S) -> Transitions:
    """Enumerate the threshold sets of the hitting probabilities and their t-interval lengths."""
    S = _as_index(S, g.n)
    if S.size == 0:
        raise DomainError("S must be nonempty")
    verts, h = hitting_probabilities(g, S)
    order = np.argsort(-h, kind="stable")
    hs = h[order]
    levels = np.unique(hs)[::-1]
    sets, probs, vols = [], [], []
    deg_sorted = g.degree[verts[order]]
    cum = np.concatenate([[0.0], np.cumsum(deg_sorted)])
    if levels[0] < 1.0:
        sets.append(np.zeros(0, dtype=np.int64))
        probs.append(1.0 - levels[0])
        vols.append(0.0)
    for j, lv in enumerate(levels):
        nxt = levels[j + 1] if j + 1 < levels.size else 0.0
        # Vertices with h ≥ lv form a prefix of the descending order.
        k = int(np.searchsorted(-hs, -lv, side="right"))
        sets.append(np.sort(verts[order[:k]]))
        probs.append(lv - nxt)
        vols.append(cum[k])
    return Transitions(sets, np.asarray(probs), np.asarray(vols))


def esp_step(g: Graph, S, rng) -> np.ndarray:
    """One step of the plain evolving set process: threshold at t ~ U[0, 1]."""
    S = _as_index(S, g.n)
    if S.size == 0 or S.size == g.n:
        raise DomainError("S must be a nonempty proper subset")
    t = _rng(rng).random()
    verts, h = hitting_probabilities(g, S)
    return verts[h >= t]


def _volume_biased_step(g: Graph, S: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    tr = transitions(g, S)
    pick = rng.choice(len(tr.sets), p=tr.volume_biased(float(g.degree[S].sum())))
    return tr.sets[pick]


def volume_biased_sample(g: Graph, start: int, T: int, rng) -> list[np.ndarray]:
    """S₀ = {start}, S₁, …, S_T from the volume-biased ESP; stops early once S = V."""
    if T < 0:
        raise DomainError("T must be nonnegative")
    if g.degree[start] <= 0:
        raise DomainError("start vertex has zero degree")
    rng = _rng(rng)
    S = np.array([start], dtype=np.int64)
    out = [S]
    for _ in range(T):
        if S.size == g.n:
            break
        S = _volume_biased_step(g, S, rng)
        out.append(S)
    return out


def set_conductance(g: Graph, S: np.ndarray) -> float:
    """Φ(S) with min(vol S, vol S̄) below; inf when that is zero."""
    vol = float(g.degree[S].sum())
    if vol <= 0:
        return math.inf
    mask = np.zeros(g.n, dtype=bool)
    mask[S] = True
    rows = g.adjacency[S]
    cut = float(rows.data[~mask[rows.indices]].sum())
    denom = min(vol, g.total_volume - vol)
    return cut / denom if denom > 0 else math.inf


@dataclass
class EspState:
    """A trajectory of the volume-biased ESP."""

    current_set: np.ndarray
    history: list = field(default_factory=list)
    """(size, volume, conductance) of each visited set."""
    seed: object = None


def lazy_simplify(S, n: int) -> np.ndarray:
    """Drop both copies of every vertex present twice in a cover set."""
    mask = as_mask(S, 2 * n).copy()
    both = mask[:n] & mask[n:]
    mask[:n] &= ~both
    mask[n:] &= ~both
    if not mask.any():
        raise DomainError("simplified set is empty")
    return np.flatnonzero(mask)


def simplicity_gap(g: Graph, S, n: int) -> float:
    """ε with S ε-simple: the volume of doubled copies over vol(S)."""
    mask = as_mask(S, 2 * n)
    both = np.concatenate([mask[:n] & mask[n:]] * 2)
    return float(g.degree[both].sum()) / float(g.degree[mask].sum())


@dataclass
class DirectedResult:
    pair: BipartitePair
    found: bool
    side: int
    steps: int
    conductance: float
    """Cover conductance of the chosen visited set."""
    flow_ratio: float = math.nan
    cut_imbalance: float = math.nan
    runtime_ms: float = 0.0


def steps_for(phi: float) -> int:
    """T = ⌊1/(100 φ^{2/3})⌋."""
    if not 0 < phi < 1:
        raise DomainError("phi must lie in (0, 1)")
    return int(math.floor(1.0 / (100.0 * phi ** (2.0 / 3.0))))


def _run_side(d: Digraph, H: Graph, u: int, side: int, T: int, rng: np.random.Generator) -> DirectedResult:
    t0 = time.perf_counter()
    n = d.n
    start = u if side == 1 else u + n
    if H.degree[start] <= 0:
        raise DomainError(f"vertex {u} has no {'out' if side == 1 else 'in'}-arcs")
    state = EspState(np.array([start], dtype=np.int64), seed=side)
    best, best_phi = state.current_set, math.inf
    half = H.total_volume / 2.0
    for S in volume_biased_sample(H, start, T, rng):
        phi = set_conductance(H, S)
        vol = float(H.degree[S].sum())
        state.current_set = S
        state.history.append((int(S.size), vol, phi))
        # A set past half the volume scores like its complement, whose pair is reversed.
        if vol <= half and phi < best_phi:
            best, best_phi = S, phi
    steps = len(state.history) - 1
    mask = as_mask(best, 2 * n)
    L = np.flatnonzero(mask[:n] & ~mask[n:])
    R = np.flatnonzero(mask[n:] & ~mask[:n])
    ms = 1000.0 * (time.perf_counter() - t0)
    if L.size == 0 and R.size == 0:
        return DirectedResult(BipartitePair(frozenset(), frozenset()), False, side, steps, best_phi, runtime_ms=ms)
    F = flow_ratio(d, L, R)
    try:
        ci = cut_imbalance(d, L, R)
    except DomainError:
        ci = math.nan
    metrics = {"flow_ratio": F}
    if not math.isnan(ci):
        metrics["cut_imbalance"] = ci
    pair = BipartitePair(frozenset(L.tolist()), frozenset(R.tolist()), metrics)
    return DirectedResult(pair, True, side, steps, best_phi, F, ci, ms)


def evo_cut_directed(d: Digraph, u: int, side, phi: float, rng=None, T: int | None = None) -> DirectedResult:
    """Pair (L, R) around u with few arcs leaving L or entering R other than L → R.

    The visited set of least cover conductance among those holding at most
    half the cover volume is split into L and R.  ``side`` is 1 if u is expected in L, 2 if in R, or ``"both"`` to try
    both copies; then the side whose visited set has lower cover conductance
    wins.  ``T`` overrides the step count derived from ``phi``.
    """
    T = steps_for(phi) if T is None else int(T)
    H = semi_double_cover(d)
    rng = _rng(rng)
    if side in (1, 2):
        return _run_side(d, H, u, int(side), T, rng)
    if side != "both":
        raise DomainError("side must be 1, 2 or 'both'")
    results = []
    for s, sub in zip((1, 2), rng.spawn(2)):
        try:
            results.append(_run_side(d, H, u, s, T, sub))
        except DomainError:
            continue
    if not results:
        raise DomainError(f"vertex {u} has no arcs")
    found = [r for r in results if r.found] or results
    return min(found, key=lambda r: r.conductance)
