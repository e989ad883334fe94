"""Named experiment protocols, each a dataclass config plus a runner returning plain dicts.

Trials draw their instances and seeds from independent streams keyed by
(master seed, trial), so results do not depend on scheduling order.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields

import numpy as np

from densekit.generators import cbm_plus, cycle_meta_graph, hyper_two_cluster, local_sbm3, meta_sbm, stream
from densekit.graph import DomainError, bipartiteness
from densekit.hypergraph import clique_cut, find_bipartite_components
from densekit.local_bipartite import loc_bipart_dc
from densekit.local_directed import evo_cut_directed
from densekit.metrics import f1_score, matched_accuracy, misclassified_ratio, pair_ari
from densekit.spectral import spectral_cluster


def thread_count() -> int:
    """Worker cap from ``DENSEKIT_THREADS`` (default 1)."""
    raw = os.environ.get("DENSEKIT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise DomainError(f"DENSEKIT_THREADS must be an integer, got {raw!r}") from None


def run_trials(fn, count: int) -> list:
    """fn(trial) for trial in range(count), in trial order whatever the schedule."""
    workers = min(thread_count(), max(count, 1))
    if workers == 1:
        return [fn(t) for t in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(count)))


def _mean(rows: list[dict], key: str) -> float:
    vals = [r[key] for r in rows if r.get(key) is not None]
    return float(np.mean(vals)) if vals else float("nan")


# ---------------------------------------------------------------------------
# Spectral clustering with fewer eigenvectors on a cycle meta-graph


@dataclass
class Fig46Config:
    k: int = 10
    n: int = 200
    p: float = 0.01
    ratios: tuple = (2.0, 2.5, 3.0)
    ells: tuple = (3, 10)
    trials: int = 10
    seed: int = 0


def fig_4_6(cfg: Fig46Config) -> dict:
    M = cycle_meta_graph(cfg.k)
    rows = []
    for ratio in cfg.ratios:
        def trial(t, ratio=ratio):
            g, planted = meta_sbm(M, cfg.n, cfg.p, cfg.p / ratio, seed=cfg.seed * 1000 + t)
            out = {}
            for ell in cfg.ells:
                lab = spectral_cluster(g, cfg.k, ell, seed=t).labels
                out[ell] = matched_accuracy(planted.labels, lab)
            return out

        res = run_trials(trial, cfg.trials)
        rows.append({"ratio": ratio, **{f"accuracy_ell_{ell}": float(np.mean([r[ell] for r in res]))
                                         for ell in cfg.ells}})
    return {"rows": rows}


# ---------------------------------------------------------------------------
# LocBipartDC on the three-cluster SBM


TABLE_5_1_ROWS = {
    1: dict(n1=1000, p1=1e-3, q1=0.018),
    2: dict(n1=10_000, p1=1e-4, q1=0.0018),
    3: dict(n1=100_000, p1=1e-5, q1=0.00018),
    4: dict(n1=1000, p1=4e-3, q1=0.012),
}


@dataclass
class Table51Config:
    row: int = 1
    n1: int | None = None
    p1: float | None = None
    q1: float | None = None
    trials: int = 10
    alpha: float = 0.02
    eps: float = 1e-5
    beta_hat: float = 0.15
    seed: int = 0


def _local_sbm_trial(cfg, n1, p1, q1, t) -> dict:
    g, C1, C2, _ = local_sbm3(n1, p1, q1, seed=cfg.seed * 1000 + t)
    target = np.concatenate([C1, C2])
    u = int(stream(cfg.seed, 51, t).choice(target))
    gamma = float(g.degree[target].sum())
    res = loc_bipart_dc(g, u, gamma, cfg.beta_hat, alpha=cfg.alpha, eps=cfg.eps)
    out = {"trial": t, "seed_vertex": u, "found": res.found, "runtime_ms": res.runtime_ms,
           "target_beta": bipartiteness(g, C1, C2), "target_volume": gamma}
    if res.L or res.R:
        out.update(beta=res.beta, ari=pair_ari(g.n, (C1, C2), (res.L, res.R)),
                   misclassified=misclassified_ratio(C1, C2, res.L, res.R), volume=res.volume)
    else:
        out.update(beta=None, ari=0.0, misclassified=1.0, volume=0.0)
    return out


def table_5_1(cfg: Table51Config) -> dict:
    params = dict(TABLE_5_1_ROWS.get(cfg.row, {}))
    for key in ("n1", "p1", "q1"):
        if getattr(cfg, key) is not None:
            params[key] = getattr(cfg, key)
    if set(params) != {"n1", "p1", "q1"}:
        raise DomainError(f"unknown row {cfg.row} and no explicit n1/p1/q1")
    trials = run_trials(lambda t: _local_sbm_trial(cfg, params["n1"], params["p1"], params["q1"], t), cfg.trials)
    summary = {k: _mean(trials, k) for k in ("beta", "ari", "misclassified", "runtime_ms", "target_beta",
                                            "target_volume")}
    return {"params": params, "summary": summary, "trials": trials}


@dataclass
class Fig5AriConfig:
    """ARI of LocBipartDC as q₁/p₁ grows with n₁ and p₁ fixed."""

    n1: int = 1000
    p1: float = 1e-3
    ratios: tuple = (6.0, 10.0, 14.0, 18.0)
    trials: int = 10
    alpha: float = 0.02
    eps: float = 1e-5
    beta_hat: float = 0.15
    seed: int = 0


def fig_5_ari(cfg: Fig5AriConfig) -> dict:
    rows = []
    for ratio in cfg.ratios:
        q1 = ratio * cfg.p1
        trials = run_trials(lambda t: _local_sbm_trial(cfg, cfg.n1, cfg.p1, q1, t), cfg.trials)
        rows.append({"ratio": ratio, "ari": _mean(trials, "ari"), "beta": _mean(trials, "beta"),
                     "target_beta": _mean(trials, "target_beta")})
    return {"rows": rows}


# ---------------------------------------------------------------------------
# EvoCutDirected on CBM+


@dataclass
class CbmPlusConfig:
    k: int = 3
    n: int = 1000
    n_local: int = 100
    p: float = 0.001
    q: float = 0.01
    eta: float = 0.9
    q1_local: float = 0.5
    q2_local: float = 0.005
    eta_local: float = 1.0
    phi: float = 1e-5
    side: str = "both"
    trials: int = 10
    seed: int = 0


def cbm_plus_experiment(cfg: CbmPlusConfig) -> dict:
    def trial(t):
        d, planted = cbm_plus(cfg.k, cfg.n, cfg.p, cfg.q, cfg.eta, cfg.n_local, cfg.q1_local, cfg.q2_local,
                              cfg.eta_local, seed=cfg.seed * 1000 + t)
        A, B = planted.blocks[cfg.k], planted.blocks[cfg.k + 1]
        rng = stream(cfg.seed, 53, t)
        u = int(rng.choice(np.concatenate([A, B])))
        side = cfg.side if cfg.side == "both" else int(cfg.side)
        res = evo_cut_directed(d, u, side, cfg.phi, rng)
        out = {"trial": t, "seed_vertex": u, "found": res.found, "steps": res.steps, "runtime_ms": res.runtime_ms}
        if res.found:
            out.update(ari=pair_ari(d.n, (A, B), (res.pair.L, res.pair.R)), flow_ratio=res.flow_ratio,
                       f1=f1_score((A, B), (res.pair.L, res.pair.R)))
        else:
            out.update(ari=0.0, flow_ratio=None, f1=0.0)
        return out

    trials = run_trials(trial, cfg.trials)
    summary = {k: _mean(trials, k) for k in ("ari", "flow_ratio", "f1", "runtime_ms", "steps")}
    return {"summary": summary, "trials": trials}


# ---------------------------------------------------------------------------
# Hypergraph diffusion against the clique reduction


@dataclass
class Fig65Config:
    n: int = 200
    r: int = 3
    p: float = 1e-4
    ratios: tuple = (2.0, 3.0, 4.0, 5.0, 6.0)
    trials: int = 10
    mode: str = "approx"
    max_iters: int = 1000
    seed: int = 0


def _hyper_trial(cfg, q, t, with_quality=True) -> dict:
    h, L, R = hyper_two_cluster(cfg.n, cfg.r, cfg.p, q, seed=cfg.seed * 1000 + t)
    t0 = time.perf_counter()
    diff = find_bipartite_components(h, mode=cfg.mode, max_iters=cfg.max_iters)
    t1 = time.perf_counter()
    cc = clique_cut(h)
    t2 = time.perf_counter()
    out = {"trial": t, "edges": h.m, "diffusion_beta_h": diff.pair.metrics["beta_h"],
           "clique_beta_h": cc.metrics["beta_h"], "diffusion_ms": 1000 * (t1 - t0),
           "clique_ms": 1000 * (t2 - t1), "iters": diff.iters, "converged": diff.converged}
    if with_quality:
        out["diffusion_f1"] = f1_score((L, R), (diff.pair.L, diff.pair.R))
        out["clique_f1"] = f1_score((L, R), (cc.L, cc.R))
    return out


def fig_6_5(cfg: Fig65Config) -> dict:
    rows = []
    for ratio in cfg.ratios:
        trials = run_trials(lambda t: _hyper_trial(cfg, ratio * cfg.p, t), cfg.trials)
        row = {"ratio": ratio, "edges": _mean(trials, "edges")}
        for key in ("diffusion_beta_h", "clique_beta_h", "diffusion_f1", "clique_f1", "diffusion_ms", "clique_ms"):
            row[key] = _mean(trials, key)
        rows.append(row)
    return {"rows": rows}


@dataclass
class Table62Config:
    n: int = 2000
    settings: tuple = ((4, 1e-9),)
    """(rank, p) pairs; q = 2p throughout."""
    trials: int = 3
    mode: str = "approx"
    max_iters: int = 1000
    seed: int = 0


def table_6_2(cfg: Table62Config) -> dict:
    rows = []
    for r, p in cfg.settings:
        sub = Fig65Config(n=cfg.n, r=int(r), p=float(p), mode=cfg.mode, max_iters=cfg.max_iters, seed=cfg.seed)
        trials = run_trials(lambda t: _hyper_trial(sub, 2 * sub.p, t, with_quality=False), cfg.trials)
        rows.append({"r": int(r), "p": float(p), "edges": _mean(trials, "edges"),
                     "diffusion_seconds": _mean(trials, "diffusion_ms") / 1000,
                     "clique_seconds": _mean(trials, "clique_ms") / 1000})
    return {"rows": rows}


# ---------------------------------------------------------------------------

PRESETS = {
    "fig-4-6": (Fig46Config, fig_4_6),
    "table-5-1": (Table51Config, table_5_1),
    "fig-5-ari": (Fig5AriConfig, fig_5_ari),
    "cbm-plus": (CbmPlusConfig, cbm_plus_experiment),
    "fig-6-5": (Fig65Config, fig_6_5),
    "table-6-2": (Table62Config, table_6_2),
}


def _coerce(value: str, default):
    if isinstance(default, bool):
        return value.lower() in ("1", "true", "yes")
    if isinstance(default, tuple):
        parts = [p for p in value.replace(";", ",").split(",") if p]
        if default and isinstance(default[0], tuple):
            return tuple(tuple(float(x) for x in p.split(":")) for p in parts)
        cast = type(default[0]) if default else float
        return tuple(cast(p) for p in parts)
    if default is None:
        return float(value) if any(c in value for c in ".e") else int(value)
    return type(default)(value)


def make_config(name: str, overrides: dict | None = None):
    """Preset config with string overrides coerced to each field's type."""
    if name not in PRESETS:
        raise DomainError(f"unknown experiment {name!r}; choose from {sorted(PRESETS)}")
    cls, _ = PRESETS[name]
    cfg = cls()
    known = {f.name for f in fields(cls)}
    for key, raw in (overrides or {}).items():
        key = key.replace("-", "_")
        if key not in known:
            raise DomainError(f"{name} has no parameter {key!r}")
        setattr(cfg, key, _coerce(str(raw), getattr(cfg, key)) if isinstance(raw, str) else raw)
    return cfg


def run_experiment(name: str, overrides: dict | None = None) -> dict:
    cfg = make_config(name, overrides)
    _, fn = PRESETS[name]
    t0 = time.perf_counter()
    result = fn(cfg)
    return {"experiment": name, "config": asdict(cfg), "wall_ms": 1000 * (time.perf_counter() - t0), **result}
