"""Command-line front end.  Every subcommand prints one JSON record (or writes it with ``--out``).

Exit status is 0 on success, 1 on a domain or input error, 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from densekit import __version__
from densekit.experiments import PRESETS, run_experiment
from densekit.generators import GENERATORS, cycle_meta_graph
from densekit.graph import (Digraph, DomainError, Hypergraph, ParseError, read_digraph, read_graph,
                            read_hypergraph, write_graph, write_hypergraph)
from densekit.hypergraph import RateError, clique_start_vector, find_bipartite_components
from densekit.local_bipartite import loc_bipart_dc
from densekit.local_directed import evo_cut_directed
from densekit.metrics import (adjusted_rand_index, f1_score, matched_accuracy, misclassified_ratio, pair_ari,
                              rand_index)
from densekit.spectral import SolverError, spectral_cluster

SIG_DIGITS = 12


class UsageError(Exception):
    pass


def canonical(obj):
    """Round floats to 12 significant digits; non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return canonical(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return float(f"{x:.{SIG_DIGITS}g}")
    if isinstance(obj, (set, frozenset)):
        return sorted(canonical(v) for v in obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(canonical(obj), sort_keys=True, ensure_ascii=False)


def _emit(payload: dict, out: str | None) -> None:
    text = dumps(payload) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _record(command: str, config: dict, seed, result: dict, t0: float) -> dict:
    return {"command": command, "config": config, "seed": seed, "version": __version__,
            "wall_ms": 1000.0 * (time.perf_counter() - t0), "result": result}


def _parse_params(text: str | None) -> dict:
    out = {}
    if not text:
        return out
    for item in text.split(","):
        if not item.strip():
            continue
        if "=" not in item:
            raise UsageError(f"parameter {item!r} is not key=value")
        key, val = item.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def _number(text: str):
    try:
        return int(text)
    except ValueError:
        try:
            return float(text)
        except ValueError:
            return text


def _vertex(labels: list[str], name: str) -> int:
    try:
        return labels.index(name)
    except ValueError:
        raise DomainError(f"vertex {name!r} does not appear in the input") from None


def _names(labels: list[str], vs) -> list[str]:
    return sorted((labels[int(v)] for v in vs), key=lambda s: (len(s), s))


# ---------------------------------------------------------------------------
# generate


def cmd_generate(args) -> dict:
    if args.model not in GENERATORS:
        raise UsageError(f"unknown model {args.model!r}; choose from {sorted(GENERATORS)}")
    params = {k: _number(v) for k, v in _parse_params(args.params).items()}
    fn = GENERATORS[args.model]
    if args.model == "meta_sbm":
        meta = str(params.pop("meta", "cycle"))
        k = int(params.pop("k", 10))
        if meta != "cycle":
            raise UsageError("meta_sbm supports meta=cycle")
        params["M"] = cycle_meta_graph(k)
    try:
        out = fn(**params, seed=args.seed)
    except TypeError as exc:
        raise UsageError(f"bad parameters for {args.model}: {exc}") from None
    obj = out[0]
    if args.model == "local_sbm3":
        truth = [b.tolist() for b in out[1:]]
    elif args.model == "hyper_two_cluster":
        _, L, R = out
        inside = set(map(int, L)) | set(map(int, R))
        rest = [v for v in range(obj.n) if v not in inside]
        truth = [sorted(map(int, L)), sorted(map(int, R))] + ([rest] if rest else [])
    else:
        truth = [b.tolist() for b in out[1].blocks]
    kind = "hypergraph" if isinstance(obj, Hypergraph) else ("digraph" if isinstance(obj, Digraph) else "graph")
    result = {"kind": kind, "n": obj.n, "m": obj.m}
    files = (args.out or "").split(",") if args.out else []
    if files:
        with open(files[0], "w", encoding="utf-8") as fh:
            (write_hypergraph if kind == "hypergraph" else write_graph)(obj, fh)
        result["graph_file"] = files[0]
        if len(files) > 1:
            Path(files[1]).write_text(dumps(truth) + "\n", encoding="utf-8")
            result["truth_file"] = files[1]
    else:
        if kind == "hypergraph":
            result["edges"] = [[float(w)] + list(e) for e, w in zip(obj.edges, obj.weight)]
        elif kind == "digraph":
            result["edges"] = [[u, v, w] for u, v, w in obj.arcs]
        else:
            result["edges"] = [[int(u), int(v), float(w)] for u, v, w in zip(obj.src, obj.dst, obj.weight)]
        result["truth"] = truth
    return result


# ---------------------------------------------------------------------------
# cluster / local queries / hypergraph


def cmd_cluster(args) -> dict:
    g, labels = read_graph(args.graph)
    res = spectral_cluster(g, args.k, args.ell, seed=args.seed)
    csv_path = args.embedding_out
    if csv_path:
        with open(csv_path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["vertex"] + [f"f{i + 1}" for i in range(res.embedding.ell)])
            for v in range(g.n):
                w.writerow([labels[v]] + [f"{x:.{SIG_DIGITS}g}" for x in res.embedding.points[v]])
    clusters = [_names(labels, c) for c in res.clusters]
    return {"clusters": clusters, "k": args.k, "ell": res.embedding.ell, "embedding_csv": csv_path}


def cmd_local_bipartite(args) -> dict:
    g, labels = read_graph(args.graph)
    u = _vertex(labels, args.seed)
    res = loc_bipart_dc(g, u, args.gamma, args.beta, alpha=args.alpha, eps=args.eps)
    return {"L": _names(labels, res.L), "R": _names(labels, res.R), "beta": res.beta, "volume": res.volume,
            "found": res.found, "pushes": res.pushes, "runtime_ms": res.runtime_ms}


def cmd_local_directed(args) -> dict:
    d, labels = read_digraph(args.digraph)
    u = _vertex(labels, args.seed)
    side = args.side if args.side == "both" else int(args.side)
    res = evo_cut_directed(d, u, side, args.phi, np.random.default_rng(args.seed_rng), T=args.steps)
    return {"L": _names(labels, res.pair.L), "R": _names(labels, res.pair.R), "found": res.found,
            "side": res.side, "flow_ratio": res.flow_ratio, "cut_imbalance": res.cut_imbalance,
            "steps": res.steps, "runtime_ms": res.runtime_ms}


def _start_vector(h: Hypergraph, spec: str, labels: list[str], seed: int) -> np.ndarray:
    if spec == "clique":
        return clique_start_vector(h)
    if spec == "random":
        return np.random.default_rng(seed).standard_normal(h.n)
    f = np.zeros(h.n)
    with open(spec, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            toks = raw.split()
            if not toks or toks[0].startswith("#"):
                continue
            if len(toks) != 2:
                raise ParseError(lineno, "expected 'vertex value'")
            try:
                f[_vertex(labels, toks[0])] = float(toks[1])
            except ValueError:
                raise ParseError(lineno, f"bad value {toks[1]!r}") from None
    return f


def cmd_hyper_bipartite(args) -> dict:
    h, labels = read_hypergraph(args.hypergraph)
    f0 = _start_vector(h, args.f0, labels, args.seed_rng)
    res = find_bipartite_components(h, f0, eps=args.eps, max_iters=args.max_iters, mode=args.mode)
    path = args.history_out
    if path:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["iteration", "rayleigh_quotient"])
            for i, rq in enumerate(res.rq_history):
                w.writerow([i, f"{rq:.{SIG_DIGITS}g}"])
    return {"lambda": res.lam, "L": _names(labels, res.pair.L), "R": _names(labels, res.pair.R),
            "beta_h": res.pair.metrics["beta_h"], "iters": res.iters, "converged": res.converged,
            "rq_history_csv_path": path}


# ---------------------------------------------------------------------------
# eval


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.lineno, f"invalid JSON in {path}: {exc.msg}") from None


def _as_blocks(obj) -> list[list[str]]:
    """Blocks of vertex names from a partition list, a cluster record, or an (L, R) record."""
    if isinstance(obj, dict):
        if "result" in obj and isinstance(obj["result"], dict):
            obj = obj["result"]
        if "clusters" in obj:
            obj = obj["clusters"]
        elif "L" in obj and "R" in obj:
            obj = [obj["L"], obj["R"]]
        elif "truth" in obj:
            obj = obj["truth"]
        else:
            raise DomainError("record holds no partition, clusters or (L, R) pair")
    if not isinstance(obj, list) or not all(isinstance(b, list) for b in obj):
        raise DomainError("expected a list of vertex lists")
    return [[str(v) for v in b] for b in obj]


def cmd_eval(args) -> dict:
    truth = _as_blocks(_load_json(args.truth))
    pred = _as_blocks(_load_json(args.pred))
    names = sorted({v for b in truth for v in b}, key=lambda s: (len(s), s))
    index = {v: i for i, v in enumerate(names)}
    n = len(names)
    t_lab = np.full(n, -1, dtype=np.int64)
    for i, b in enumerate(truth):
        for v in b:
            if t_lab[index[v]] >= 0:
                raise DomainError(f"vertex {v!r} appears twice in the truth")
            t_lab[index[v]] = i
    p_lab = np.full(n, -1, dtype=np.int64)
    for i, b in enumerate(pred):
        for v in b:
            if v not in index:
                raise DomainError(f"predicted vertex {v!r} is not in the truth universe")
            p_lab[index[v]] = i
    # Vertices the prediction leaves out count as singletons.
    missing = np.flatnonzero(p_lab < 0)
    p_lab[missing] = len(pred) + np.arange(missing.size)
    tp = [truth[a] for a in args.truth_pair] if len(truth) >= 2 else truth
    pp = pred[:2] if len(pred) >= 2 else pred + [[]] * (2 - len(pred))
    tsets = [{index[v] for v in b} for b in tp]
    psets = [{index[v] for v in b} for b in pp]
    out = {}
    for m in args.metrics:
        if m == "ri":
            out[m] = rand_index(t_lab, p_lab)
        elif m == "ari":
            out[m] = adjusted_rand_index(t_lab, p_lab)
        elif m == "accuracy":
            out[m] = matched_accuracy(t_lab, p_lab)
        elif m == "f1":
            out[m] = f1_score(tsets, psets)
        elif m == "misclassified":
            out[m] = misclassified_ratio(*tsets, *psets)
        elif m == "pair_ari":
            out[m] = pair_ari(n, tsets, psets)
        else:
            raise UsageError(f"unknown metric {m!r}")
    return {"metrics": out, "n": n}


# ---------------------------------------------------------------------------
# experiment


def cmd_experiment(args) -> dict:
    overrides = _parse_params(",".join(args.set)) if args.set else {}
    if args.trials is not None:
        overrides["trials"] = str(args.trials)
    if args.row is not None:
        overrides["row"] = str(args.row)
    if args.rng_seed is not None:
        overrides["seed"] = str(args.rng_seed)
    return run_experiment(args.name, overrides)


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="densekit", description="Clustering and dense-pair discovery on graphs and hypergraphs.")
    p.add_argument("--version", action="version", version=f"densekit {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="sample a seeded synthetic instance")
    g.add_argument("--model", required=True)
    g.add_argument("--params", default="")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", help="FILE[,TRUTH_FILE]")

    c = sub.add_parser("cluster", help="spectral clustering with ell eigenvectors")
    c.add_argument("--graph", required=True)
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--ell", type=int)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--embedding-out")
    c.add_argument("--out")

    lb = sub.add_parser("local-bipartite", help="local densely connected pair around a seed vertex")
    lb.add_argument("--graph", required=True)
    lb.add_argument("--seed", required=True, help="seed vertex label")
    lb.add_argument("--gamma", type=float, required=True)
    lb.add_argument("--beta", type=float, required=True)
    lb.add_argument("--alpha", type=float)
    lb.add_argument("--eps", type=float)
    lb.add_argument("--seed-rng", type=int, default=0, help="accepted for symmetry; the search is deterministic")
    lb.add_argument("--out")

    ld = sub.add_parser("local-directed", help="local directed pair around a seed vertex")
    ld.add_argument("--digraph", required=True)
    ld.add_argument("--seed", required=True, help="seed vertex label")
    ld.add_argument("--phi", type=float, required=True)
    ld.add_argument("--side", choices=["1", "2", "both"], default="both")
    ld.add_argument("--steps", type=int, help="override the step count derived from phi")
    ld.add_argument("--seed-rng", type=int, default=0)
    ld.add_argument("--out")

    hb = sub.add_parser("hyper-bipartite", help="diffusion-based dense pair in a hypergraph")
    hb.add_argument("--hypergraph", required=True)
    hb.add_argument("--mode", choices=["lp", "approx"], default="lp")
    hb.add_argument("--eps", type=float, default=1.0)
    hb.add_argument("--f0", default="clique", help="clique, random, or a file of 'vertex value' lines")
    hb.add_argument("--max-iters", type=int, default=1000)
    hb.add_argument("--seed-rng", type=int, default=0)
    hb.add_argument("--history-out")
    hb.add_argument("--out")

    e = sub.add_parser("eval", help="score a prediction against ground truth")
    e.add_argument("--truth", required=True)
    e.add_argument("--pred", required=True)
    e.add_argument("--metrics", default="ri,ari", type=lambda s: [m for m in s.split(",") if m])
    e.add_argument("--truth-pair", default="0,1", type=lambda s: [int(x) for x in s.split(",")])
    e.add_argument("--out")

    x = sub.add_parser("experiment", help="run a named experiment preset")
    x.add_argument("name", choices=sorted(PRESETS))
    x.add_argument("--row", type=int)
    x.add_argument("--trials", type=int)
    x.add_argument("--rng-seed", type=int)
    x.add_argument("--set", action="append", default=[], help="key=value override, repeatable")
    x.add_argument("--out")
    return p


COMMANDS = {
    "generate": cmd_generate,
    "cluster": cmd_cluster,
    "local-bipartite": cmd_local_bipartite,
    "local-directed": cmd_local_directed,
    "hyper-bipartite": cmd_hyper_bipartite,
    "eval": cmd_eval,
    "experiment": cmd_experiment,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"densekit: usage error: {exc}", file=sys.stderr)
        return 2
    t0 = time.perf_counter()
    config = {k: v for k, v in vars(args).items() if k not in ("command", "out")}
    try:
        result = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"densekit: usage error: {exc}", file=sys.stderr)
        return 2
    except ParseError as exc:
        print(f"densekit: parse error: {exc}", file=sys.stderr)
        return 1
    except (DomainError, SolverError, RateError, OSError) as exc:
        print(f"densekit: error: {exc}", file=sys.stderr)
        return 1
    seed = getattr(args, "seed", None) if args.command == "generate" else getattr(args, "seed_rng", None)
    if args.command == "generate" and args.out:
        # The instance files are the canonical artefact; keep the record free of timing.
        _emit({"command": "generate", "config": config, "version": __version__, "result": result}, None)
        return 0
    _emit(_record(args.command, config, seed, result, t0), getattr(args, "out", None))
    return 0


if __name__ == "__main__":
    sys.exit(main())
