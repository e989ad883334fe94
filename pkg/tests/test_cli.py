import json
import subprocess
import sys

import pytest

from densekit.cli import canonical, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if code == 0 and out.out.strip() else None), out.err


def test_canonical_rounding():
    assert canonical({"x": 0.1 + 0.2, "y": float("nan"), "z": [float("inf")]}) == {"x": 0.3, "y": "nan", "z": ["inf"]}


def test_generate_is_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    for f in (a, b):
        code, rec, _ = run(capsys, "generate", "--model", "sbm", "--params", "n=60,k=3,p=0.3,q=0.02",
                           "--seed", "4", "--out", f"{f},{f}.truth")
        assert code == 0 and rec["result"]["n"] == 60
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a.txt.truth").read_bytes() == (tmp_path / "b.txt.truth").read_bytes()


def test_generate_inline_and_meta(capsys):
    code, rec, _ = run(capsys, "generate", "--model", "meta_sbm", "--params", "meta=cycle,k=4,n=10,p=0.5,q=0.1")
    assert code == 0 and rec["result"]["kind"] == "graph" and len(rec["result"]["truth"]) == 4
    code, rec, _ = run(capsys, "generate", "--model", "cbm", "--params", "k=3,n=20,p=0.2,q=0.1,eta=0.9")
    assert rec["result"]["kind"] == "digraph"


def test_cluster_and_eval(tmp_path, capsys):
    g = tmp_path / "g.txt"
    run(capsys, "generate", "--model", "sbm", "--params", "n=90,k=3,p=0.5,q=0.01", "--seed", "1",
        "--out", f"{g},{tmp_path / 't.json'}")
    emb = tmp_path / "emb.csv"
    pred = tmp_path / "pred.json"
    code, _, _ = run(capsys, "cluster", "--graph", str(g), "--k", "3", "--ell", "2",
                     "--embedding-out", str(emb), "--out", str(pred))
    assert code == 0
    assert emb.read_text().splitlines()[0] == "vertex,f1,f2"
    code, rec, _ = run(capsys, "eval", "--truth", str(tmp_path / "t.json"), "--pred", str(pred),
                       "--metrics", "ri,ari,accuracy")
    assert code == 0
    assert rec["result"]["metrics"]["ari"] == pytest.approx(1.0)


def test_local_bipartite_command(tmp_path, capsys):
    g = tmp_path / "kb.txt"
    g.write_text("".join(f"a{i} b{j}\n" for i in range(4) for j in range(4)))
    code, rec, _ = run(capsys, "local-bipartite", "--graph", str(g), "--seed", "a0", "--gamma", "32",
                       "--beta", "0.3", "--alpha", "0.1", "--eps", "1e-4")
    assert code == 0
    res = rec["result"]
    assert res["found"] and res["beta"] <= 0.3
    assert set(res["L"]) <= {f"a{i}" for i in range(4)}
    assert set(rec) >= {"command", "config", "seed", "version", "wall_ms", "result"}


def test_local_directed_command(tmp_path, capsys):
    g = tmp_path / "d.txt"
    lines = [f"l{i} r{j}" for i in range(4) for j in range(4)]
    lines += [f"x{i} x{j}" for i in range(6) for j in range(6) if i != j]
    g.write_text("\n".join(lines) + "\n")
    code, rec, _ = run(capsys, "local-directed", "--digraph", str(g), "--seed", "l1", "--phi", "1e-5",
                       "--side", "1", "--seed-rng", "3")
    assert code == 0
    assert rec["result"]["flow_ratio"] <= 0.1


def test_hyper_bipartite_command(tmp_path, capsys):
    h = tmp_path / "h.txt"
    h.write_text("1 a b c\n1 c d\n2 a d e\n1 b e\n")
    hist = tmp_path / "hist.csv"
    code, rec, _ = run(capsys, "hyper-bipartite", "--hypergraph", str(h), "--mode", "approx",
                       "--history-out", str(hist), "--max-iters", "50")
    assert code == 0
    assert hist.read_text().startswith("iteration,rayleigh_quotient")
    res = rec["result"]
    assert res["beta_h"] <= (2 * res["lambda"]) ** 0.5 + 1e-9
    f0 = tmp_path / "f0.txt"
    f0.write_text("a 1\nb -1\nc 0.5\n")
    code, _, _ = run(capsys, "hyper-bipartite", "--hypergraph", str(h), "--f0", str(f0))
    assert code == 0


def test_experiment_command(capsys):
    code, rec, _ = run(capsys, "experiment", "table-5-1", "--trials", "1", "--set", "n1=100,p1=0.01,q1=0.18")
    assert code == 0
    assert len(rec["result"]["trials"]) == 1


def test_exit_codes(tmp_path, capsys):
    assert run(capsys, "cluster")[0] == 2
    assert run(capsys, "generate", "--model", "nope")[0] == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("a b\nc\n")
    code, _, err = run(capsys, "cluster", "--graph", str(bad), "--k", "2")
    assert code == 1 and "line 2" in err
    code, _, err = run(capsys, "cluster", "--graph", str(tmp_path / "missing.txt"), "--k", "2")
    assert code == 1
    ok = tmp_path / "ok.txt"
    ok.write_text("a b\n")
    code, _, err = run(capsys, "local-bipartite", "--graph", str(ok), "--seed", "zz", "--gamma", "1", "--beta", "0.5")
    assert code == 1


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "densekit", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and "densekit" in out.stdout
