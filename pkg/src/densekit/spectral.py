"""Laplacian spectra, sweep sets and spectral clustering with ℓ ≤ k eigenvectors."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as sla
from sklearn.cluster import KMeans

from densekit.graph import BipartitePair, DomainError, Graph, bipartiteness, conductance

DENSE_CUTOFF = 200
RESIDUAL_TOL = 1e-8


class SolverError(RuntimeError):
    """The eigensolver failed to reach the residual tolerance."""


class LaplacianKind(str, Enum):
    NORMALIZED = "normalized"
    SIGNLESS = "signless"
    LAZY_WALK = "lazy_walk"


def _inv_sqrt_degree(deg: np.ndarray) -> np.ndarray:
    out = np.zeros_like(deg)
    nz = deg > 0
    out[nz] = 1.0 / np.sqrt(deg[nz])
    return out


def laplacian(g: Graph, kind: LaplacianKind | str = LaplacianKind.NORMALIZED) -> sp.csr_matrix:
    """N = I - D^{-1/2} A D^{-1/2}, Z = I + D^{-1/2} A D^{-1/2} or W = (I + A D^{-1})/2.

    Rows and columns of zero-degree vertices are left as the identity block.
    """
    kind = LaplacianKind(kind)
    A = g.adjacency
    I = sp.identity(g.n, format="csr")
    if kind is LaplacianKind.LAZY_WALK:
        inv = np.zeros(g.n)
        nz = g.degree > 0
        inv[nz] = 1.0 / g.degree[nz]
        return ((I + A @ sp.diags(inv)) * 0.5).tocsr()
    s = sp.diags(_inv_sqrt_degree(g.degree))
    M = s @ A @ s
    return (I - M).tocsr() if kind is LaplacianKind.NORMALIZED else (I + M).tocsr()


@dataclass
class EigResult:
    values: np.ndarray
    vectors: np.ndarray
    """Columns are orthonormal eigenvectors over all n vertices (zero on dropped rows)."""
    dropped: np.ndarray
    """Zero-degree vertices removed before solving."""


def smallest_eigs(g: Graph, k: int, kind: LaplacianKind | str = LaplacianKind.NORMALIZED) -> EigResult:
    """The k smallest eigenpairs of N or Z, sorted ascending.

    Zero-degree vertices are dropped.  Small problems use a dense solver and
    larger ones implicitly restarted Lanczos on the shifted operator 2I - M.
    """
    kind = LaplacianKind(kind)
    if kind is LaplacianKind.LAZY_WALK:
        raise DomainError("the lazy walk matrix is not symmetric")
    active = np.flatnonzero(g.degree > 0)
    dropped = np.flatnonzero(g.degree <= 0)
    na = active.size
    if not 1 <= k <= na:
        raise DomainError(f"k={k} outside [1, {na}]")
    M = laplacian(g, kind)[active][:, active]
    if na <= DENSE_CUTOFF or k >= na - 1:
        vals, vecs = la.eigh(M.toarray(), subset_by_index=[0, k - 1])
    else:
        shifted = (2.0 * sp.identity(na) - M).tocsr()
        v0 = np.sqrt(g.degree[active]) + 1e-3 * np.cos(np.arange(na))
        try:
            vals, vecs = sla.eigsh(shifted, k=k, which="LA", tol=1e-12, maxiter=10 * na, v0=v0)
        except sla.ArpackNoConvergence as exc:
            raise SolverError(f"Lanczos did not converge: {len(exc.eigenvalues)} of {k} pairs") from exc
        vals = 2.0 - vals
        order = np.argsort(vals, kind="stable")
        vals, vecs = vals[order], vecs[:, order]
        # Re-orthonormalise inside clusters of (near) repeated eigenvalues.
        vecs, _ = np.linalg.qr(vecs)
        ritz = vecs.T @ (M @ vecs)
        rv, rq = np.linalg.eigh((ritz + ritz.T) / 2)
        vals, vecs = rv, vecs @ rq
    resid = np.linalg.norm(M @ vecs - vecs * vals, axis=0)
    if np.any(resid > RESIDUAL_TOL):
        raise SolverError(f"residuals {resid.max():.2e} exceed {RESIDUAL_TOL}")
    full = np.zeros((g.n, k))
    full[active] = vecs
    return EigResult(values=vals, vectors=full, dropped=dropped)


def _prefix_cuts(g: Graph, order: np.ndarray) -> np.ndarray:
    """cut(S_j) for S_j = order[:j+1], j = 0..n-1."""
    pos = np.empty(g.n, dtype=np.int64)
    pos[order] = np.arange(g.n)
    a, b = pos[g.src], pos[g.dst]
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    diff = np.zeros(g.n + 1)
    np.add.at(diff, lo, g.weight)
    np.add.at(diff, hi, -g.weight)
    return np.cumsum(diff)[: g.n]


def sweep_conductances(g: Graph, order: np.ndarray) -> np.ndarray:
    """Conductance of every proper prefix of ``order`` (length n - 1)."""
    cuts = _prefix_cuts(g, order)[:-1]
    vol = np.cumsum(g.degree[order])[:-1]
    denom = np.minimum(vol, g.total_volume - vol)
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = np.where(denom > 0, cuts / np.where(denom > 0, denom, 1.0), np.inf)
    return phi


def sweep_set_cheeger(g: Graph) -> np.ndarray:
    """Minimum-conductance prefix of the vertices sorted by f₂(v)/√deg(v).

    Returns a boolean mask.  On a disconnected graph the smallest-volume
    component is returned, which has conductance zero.
    """
    if g.n < 2:
        raise DomainError("need at least two vertices")
    if np.any(g.degree <= 0):
        raise DomainError("zero-degree vertices have undefined conductance")
    comp = g.subgraph_components()
    if comp.max() > 0:
        vols = np.bincount(comp, weights=g.degree)
        return comp == int(np.argmin(vols))
    eig = smallest_eigs(g, 2)
    key = eig.vectors[:, 1] / np.sqrt(g.degree)
    order = np.lexsort((np.arange(g.n), key))
    phi = sweep_conductances(g, order)
    j = int(np.argmin(phi))
    mask = np.zeros(g.n, dtype=bool)
    mask[order[: j + 1]] = True
    return mask


# ---------------------------------------------------------------------------
# Two-sided sweep on a signed vector


def two_sided_groups(f: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vertex order by |f| descending (index tiebreak) and its threshold group ids."""
    f = np.asarray(f, dtype=float)
    if not np.any(f != 0):
        raise DomainError("f is identically zero")
    mag = np.abs(f)
    order = np.lexsort((np.arange(f.size), -mag))
    sorted_mag = mag[order]
    new_group = np.concatenate([[True], sorted_mag[1:] != sorted_mag[:-1]])
    group = np.empty(f.size, dtype=np.int64)
    group[order] = np.cumsum(new_group) - 1
    return order, group


def two_sided_pair(f: np.ndarray, group: np.ndarray, j: int) -> tuple[np.ndarray, np.ndarray]:
    inside = group <= j
    return inside & (f < 0), inside & (f >= 0)


def two_sided_sweep(g: Graph, f: np.ndarray) -> BipartitePair:
    """Best pair L_j = {|f| ≥ t, f < 0}, R_j = {|f| ≥ t, f ≥ 0} by bipartiteness."""
    f = np.asarray(f, dtype=float)
    order, group = two_sided_groups(f)
    ng = int(group.max()) + 1
    vol = np.cumsum(np.bincount(group, weights=g.degree, minlength=ng))
    opposite = (f[g.src] < 0) != (f[g.dst] < 0)
    enter = np.maximum(group[g.src], group[g.dst])[opposite]
    cross = np.cumsum(np.bincount(enter, weights=g.weight[opposite], minlength=ng))
    with np.errstate(divide="ignore", invalid="ignore"):
        beta = np.where(vol > 0, 1.0 - 2.0 * cross / np.where(vol > 0, vol, 1.0), np.inf)
    if not np.any(np.isfinite(beta)):
        raise DomainError("every sweep pair has zero volume")
    j = int(np.argmin(beta))
    L, R = two_sided_pair(f, group, j)
    return BipartitePair(np.flatnonzero(L), np.flatnonzero(R), {"beta": float(beta[j]), "sweep_index": j})


# ---------------------------------------------------------------------------
# Spectral clustering


@dataclass
class Embedding:
    points: np.ndarray
    """Row u is F(u) = deg(u)^{-1/2} (f₁(u), …, f_ℓ(u)); rows of dropped vertices are zero."""
    ell: int
    degree_weights: np.ndarray
    active: np.ndarray


def spectral_embedding(g: Graph, ell: int) -> Embedding:
    eig = smallest_eigs(g, ell)
    active = np.flatnonzero(g.degree > 0)
    pts = np.zeros((g.n, ell))
    pts[active] = eig.vectors[active] / np.sqrt(g.degree[active])[:, None]
    return Embedding(points=pts, ell=ell, degree_weights=g.degree.copy(), active=active)


@dataclass
class KMeansResult:
    labels: np.ndarray
    centres: np.ndarray
    cost: float


def weighted_kmeans(points: np.ndarray, weights: np.ndarray, k: int, seed: int = 0,
                    restarts: int = 10, max_iter: int = 300) -> KMeansResult:
    """Weighted Lloyd iterations with weighted D² seeding; best of ``restarts`` kept.

    Minimises Σ_u w(u) ‖x_u − c_{label(u)}‖².
    """
    points = np.asarray(points, dtype=float)
    weights = np.asarray(weights, dtype=float)
    distinct = np.unique(points, axis=0).shape[0]
    if k > distinct:
        raise DomainError(f"k={k} exceeds the {distinct} distinct points")
    km = KMeans(n_clusters=k, init="k-means++", n_init=restarts, max_iter=max_iter,
                tol=0.0, random_state=seed)
    km.fit(points, sample_weight=weights)
    labels = km.labels_.astype(np.int64)
    centres = km.cluster_centers_
    cost = float(np.sum(weights * np.sum((points - centres[labels]) ** 2, axis=1)))
    return KMeansResult(labels=labels, centres=centres, cost=cost)


@dataclass
class Clustering:
    labels: np.ndarray
    """Cluster id per vertex; zero-degree vertices get their own ids after the first k."""
    k: int
    embedding: Embedding

    @property
    def clusters(self) -> list[list[int]]:
        out = [np.flatnonzero(self.labels == c).tolist() for c in range(int(self.labels.max()) + 1)]
        return [c for c in out if c]


def spectral_cluster(g: Graph, k: int, ell: int | None = None, seed: int = 0,
                     restarts: int = 10) -> Clustering:
    """k-way clustering from the ℓ bottom eigenvectors of N (ℓ = k by default)."""
    ell = k if ell is None else ell
    if not 1 <= ell <= k <= g.n:
        raise DomainError("need 1 ≤ ell ≤ k ≤ n")
    emb = spectral_embedding(g, ell)
    act = emb.active
    res = weighted_kmeans(emb.points[act], g.degree[act], k, seed=seed, restarts=restarts)
    labels = np.empty(g.n, dtype=np.int64)
    labels[act] = res.labels
    isolated = np.flatnonzero(g.degree <= 0)
    labels[isolated] = k + np.arange(isolated.size)
    return Clustering(labels=labels, k=k, embedding=emb)


# ---------------------------------------------------------------------------
# Meta-graph and the Ψ(ℓ) statistic


def _partition_labels(partition, n: int) -> np.ndarray:
    labels = np.full(n, -1, dtype=np.int64)
    for i, block in enumerate(partition):
        block = np.asarray(list(block), dtype=np.int64)
        if np.any(labels[block] >= 0):
            raise DomainError("partition blocks overlap")
        labels[block] = i
    if np.any(labels < 0):
        raise DomainError("partition does not cover every vertex")
    return labels


@dataclass
class MetaGraph:
    adjacency: np.ndarray

    @property
    def degree(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    @property
    def normalized_laplacian(self) -> np.ndarray:
        d = self.degree
        inv = np.where(d > 0, 1.0 / np.sqrt(np.where(d > 0, d, 1.0)), 0.0)
        return np.eye(d.size) - inv[:, None] * self.adjacency * inv[None, :]

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.normalized_laplacian)


def meta_graph_of(g: Graph, partition) -> MetaGraph:
    """A_M(i, j) = w(S_i, S_j) off the diagonal and 2 w(S_i, S_i) on it."""
    labels = _partition_labels(partition, g.n)
    k = len(partition)
    A = np.zeros((k, k))
    np.add.at(A, (labels[g.src], labels[g.dst]), g.weight)
    # Each inside edge is counted once above; symmetrising doubles it as required.
    return MetaGraph(adjacency=A + A.T)


def psi(g: Graph, partition, ell: int) -> float:
    """Σ_{i ≤ ℓ} γ_i / λ_{ℓ+1}; returns inf when λ_{ℓ+1} = 0."""
    gam = meta_graph_of(g, partition).eigenvalues
    if not 1 <= ell <= len(gam):
        raise DomainError("ell must lie in [1, k]")
    lam = smallest_eigs(g, ell + 1).values[ell]
    num = float(np.sum(gam[:ell]))
    if lam <= 1e-12:
        return float("inf")
    return num / lam


def structure_gaps(g: Graph, partition) -> dict:
    """Distances between normalised cluster indicators and the bottom-k eigenspace.

    Returns per-cluster ‖ḡ_i − f̂_i‖², the summed ‖f_i − ĝ_i‖², λ_{k+1} and
    max_i Φ(S_i).
    """
    k = len(partition)
    labels = _partition_labels(partition, g.n)
    eig = smallest_eigs(g, k + 1)
    F = eig.vectors[:, :k]
    sq = np.sqrt(g.degree)
    G = np.zeros((g.n, k))
    for i in range(k):
        col = np.where(labels == i, sq, 0.0)
        G[:, i] = col / np.linalg.norm(col)
    proj_g = F @ (F.T @ G)
    proj_f = G @ (G.T @ F)
    return {
        "indicator_gaps": np.sum((G - proj_g) ** 2, axis=0),
        "eigvec_gap_sum": float(np.sum((F - proj_f) ** 2)),
        "lambda_next": float(eig.values[k]),
        "max_conductance": max(conductance(g, labels == i) for i in range(k)),
    }


def trevisan_pair(g: Graph) -> BipartitePair:
    """Two-sided sweep on the bottom eigenvector of Z."""
    eig = smallest_eigs(g, 1, LaplacianKind.SIGNLESS)
    f = np.zeros(g.n)
    nz = g.degree > 0
    f[nz] = eig.vectors[nz, 0] / np.sqrt(g.degree[nz])
    pair = two_sided_sweep(g, f)
    pair.metrics["lambda_max_N"] = float(2.0 - eig.values[0])
    pair.metrics["beta"] = bipartiteness(g, pair.L, pair.R)
    return pair
