"""Clustering quality scores and small exact references."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.optimize import linear_sum_assignment

from densekit.graph import DomainError, Graph, as_mask


def as_labels(partition, n: int | None = None) -> np.ndarray:
    """Accept a label vector or a list of disjoint blocks covering 0..n-1."""
    if isinstance(partition, np.ndarray) and partition.ndim == 1 and partition.dtype.kind in "iu":
        return partition.astype(np.int64)
    items = list(partition)
    if items and all(np.isscalar(x) for x in items):
        return np.asarray(items, dtype=np.int64)
    size = n if n is not None else sum(len(b) for b in items)
    labels = np.full(size, -1, dtype=np.int64)
    for i, block in enumerate(items):
        idx = np.asarray(list(block), dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= size):
            raise DomainError("vertex outside the universe")
        if np.any(labels[idx] >= 0):
            raise DomainError("blocks overlap")
        labels[idx] = i
    if np.any(labels < 0):
        raise DomainError("blocks do not cover the universe")
    return labels


@dataclass(frozen=True)
class PairConfusion:
    """Counts over unordered vertex pairs."""

    TP: int
    TN: int
    FP: int
    FN: int

    @property
    def total(self) -> int:
        return self.TP + self.TN + self.FP + self.FN


def _contingency(truth: np.ndarray, pred: np.ndarray) -> np.ndarray:
    _, t = np.unique(truth, return_inverse=True)
    _, p = np.unique(pred, return_inverse=True)
    table = np.zeros((t.max() + 1, p.max() + 1), dtype=np.int64)
    np.add.at(table, (t, p), 1)
    return table


def _pairs(x: np.ndarray) -> int:
    return int(np.sum(x * (x - 1) // 2))


def pair_confusion(truth, pred) -> PairConfusion:
    t, p = as_labels(truth), as_labels(pred)
    if t.shape != p.shape:
        raise DomainError("truth and prediction cover different universes")
    if t.size == 0:
        raise DomainError("empty universe")
    table = _contingency(t, p)
    tp = _pairs(table)
    same_t = _pairs(table.sum(axis=1))
    same_p = _pairs(table.sum(axis=0))
    fn, fp = same_t - tp, same_p - tp
    tn = comb(t.size, 2) - tp - fn - fp
    return PairConfusion(tp, tn, fp, fn)


def rand_index(truth, pred) -> float:
    c = pair_confusion(truth, pred)
    if c.total == 0:
        return 1.0
    return (c.TP + c.TN) / c.total


def adjusted_rand_index(truth, pred) -> float:
    """2(TP·TN − FP·FN) / ((TP+FN)(FN+TN) + (TP+FP)(FP+TN)); 1 when undefined."""
    c = pair_confusion(truth, pred)
    tp, tn, fp, fn = (float(x) for x in (c.TP, c.TN, c.FP, c.FN))
    den = (tp + fn) * (fn + tn) + (tp + fp) * (fp + tn)
    if den == 0:
        return 1.0
    return 2.0 * (tp * tn - fp * fn) / den


def matched_accuracy(truth, pred) -> float:
    """Fraction of vertices on the diagonal of the best cluster matching."""
    t, p = as_labels(truth), as_labels(pred)
    if t.shape != p.shape:
        raise DomainError("truth and prediction cover different universes")
    table = _contingency(t, p)
    rows, cols = linear_sum_assignment(-table)
    return float(table[rows, cols].sum()) / t.size


def _sets(pair, n=None):
    a, b = pair
    return set(int(v) for v in a), set(int(v) for v in b)


def f1_score(truth_pair, pred_pair) -> float:
    """F1 of a predicted pair against a planted pair, best of the two side matchings."""
    C1, C2 = _sets(truth_pair)
    L, R = _sets(pred_pair)
    size_pred, size_true = len(L) + len(R), len(C1) + len(C2)
    if size_pred == 0 or size_true == 0:
        return 0.0
    best = 0.0
    for A, B in ((L, R), (R, L)):
        hit = len(A & C1) + len(B & C2)
        if hit == 0:
            continue
        prec, rec = hit / size_pred, hit / size_true
        best = max(best, 2 * prec * rec / (prec + rec))
    return best


def misclassified_ratio(C1, C2, L, R) -> float:
    """(|L △ C₁| + |R △ C₂|) / (|L ∪ C₁| + |R ∪ C₂|), minimised over swapping L and R."""
    C1, C2 = set(map(int, C1)), set(map(int, C2))
    L, R = set(map(int, L)), set(map(int, R))

    def ratio(A, B):
        den = len(A | C1) + len(B | C2)
        return (len(A ^ C1) + len(B ^ C2)) / den if den else 0.0

    return min(ratio(L, R), ratio(R, L))


def pair_labels(n: int, L, R) -> np.ndarray:
    """Three-class labelling: 0 outside, 1 on L, 2 on R."""
    lab = np.zeros(n, dtype=np.int64)
    lab[as_mask(L, n)] = 1
    lab[as_mask(R, n)] = 2
    return lab


def pair_ari(n: int, truth_pair, pred_pair) -> float:
    """ARI of the three-class labellings induced by two vertex-set pairs."""
    return adjusted_rand_index(pair_labels(n, *truth_pair), pair_labels(n, *pred_pair))


# ---------------------------------------------------------------------------
# k-way expansion


def subset_conductances(g: Graph) -> np.ndarray:
    """Conductance of every subset, indexed by bitmask (inf where undefined)."""
    n = g.n
    if n > 20:
        raise DomainError("exhaustive enumeration needs n ≤ 20")
    masks = np.arange(1 << n, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(n)) & 1).astype(bool)
    vol = bits @ g.degree
    cut = np.zeros(masks.size)
    for u, v, w in zip(g.src, g.dst, g.weight):
        cut += w * (bits[:, u] != bits[:, v])
    denom = np.minimum(vol, g.total_volume - vol)
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = np.where(denom > 0, cut / np.where(denom > 0, denom, 1.0), np.inf)
    # A block of zero volume that is the whole graph is undefined too.
    return phi


def rho_exact_small(g: Graph, k: int) -> float:
    """min over k-partitions of the largest block conductance (n ≤ 14)."""
    n = g.n
    if n > 14:
        raise DomainError("rho_exact_small needs n ≤ 14")
    if not 2 <= k <= n:
        raise DomainError("need 2 ≤ k ≤ n")
    phi = subset_conductances(g)
    full = (1 << n) - 1
    # best[j][mask]: min over partitions of mask into j blocks of the max conductance.
    best = phi.copy()
    for _ in range(k - 1):
        nxt = np.full(1 << n, np.inf)
        for mask in range(1, full + 1):
            low = mask & -mask
            rest = mask ^ low
            sub = rest
            # Enumerate blocks containing the lowest set bit of mask.
            while True:
                block = sub | low
                other = mask ^ block
                if other:
                    val = max(phi[block], best[other])
                    if val < nxt[mask]:
                        nxt[mask] = val
                if sub == 0:
                    break
                sub = (sub - 1) & rest
        best = nxt
    return float(best[full])


def upsilon_lower_bound(g: Graph, partition, k: int) -> float:
    """λ_{k+1} / max_i Φ(S_i); a lower bound on Υ(k).  inf when every block is isolated."""
    from densekit.graph import conductance
    from densekit.spectral import smallest_eigs

    labels = as_labels(partition, g.n)
    blocks = np.unique(labels)
    if blocks.size != k:
        raise DomainError("partition must have k blocks")
    worst = max(conductance(g, labels == b) for b in blocks)
    lam = smallest_eigs(g, k + 1).values[k]
    return float("inf") if worst == 0 else float(lam / worst)


def upsilon_exact_small(g: Graph, k: int) -> float:
    from densekit.spectral import smallest_eigs

    rho = rho_exact_small(g, k)
    lam = smallest_eigs(g, k + 1).values[k]
    return float("inf") if rho == 0 else float(lam / rho)
