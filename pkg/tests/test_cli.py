from __future__ import annotations

import csv
import json

from networkx import petersen_graph

from rig.cli import main
from rig.model import BipartiteIncidence, read_graph, sample_bipartite, write_graph


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_gen_roundtrip(tmp_path, capsys):
    f = tmp_path / "g.txt"
    code, _, _ = run(capsys, "gen", "--n", "20", "--m", "15", "--p", "0.2", "--seed", "4",
                     "--out", str(f))
    assert code == 0
    assert read_graph(f) == sample_bipartite(20, 15, 0.2, 4)
    code, out, _ = run(capsys, "gen", "--n", "5", "--m", "3", "--p", "0.5", "--seed", "1")
    assert out.startswith("RIG 5 3 0.5 1\n")


def test_ham_exit_codes(tmp_path, capsys):
    ok = tmp_path / "ok.txt"
    write_graph(sample_bipartite(6, 1, 1.0, 0), ok)
    code, out, _ = run(capsys, "ham", "--in", str(ok), "--d", "6")
    assert code == 0 and json.loads(out)["status"] == "cycle"
    bad = tmp_path / "bad.txt"
    write_graph(sample_bipartite(6, 3, 0.0, 0), bad)
    code, out, _ = run(capsys, "ham", "--in", str(bad), "--d", "2")
    rep = json.loads(out)
    assert code == 2 and rep["status"] == "failure" and rep["stage"] == 1
    # Petersen graph as an incidence with one feature per edge
    edges = list(petersen_graph().edges())
    sets = [[i for i, e in enumerate(edges) if v in e] for v in range(10)]
    pf = tmp_path / "pet.txt"
    write_graph(BipartiteIncidence.from_feature_sets(len(edges), sets), pf)
    code, out, _ = run(capsys, "ham", "--in", str(pf), "--d", "3", "--max-queue", "10")
    assert code == 3 and json.loads(out)["status"] == "overflow"


def test_ham_needs_d_without_p(tmp_path, capsys):
    f = tmp_path / "g.txt"
    write_graph(BipartiteIncidence.from_feature_sets(1, [[0]] * 4), f)
    code, _, err = run(capsys, "ham", "--in", str(f))
    assert code == 1 and "--d" in err


def test_props_json_lines(tmp_path, capsys):
    f = tmp_path / "g.txt"
    write_graph(sample_bipartite(14, 14, 0.2, 2), f)
    code, out, _ = run(capsys, "props", "--in", str(f), "--checks", "P0,P3,P5", "--samples", "50")
    lines = [json.loads(s) for s in out.splitlines()]
    assert code == 0 and [d["property"] for d in lines] == ["P0", "P3", "P5"]
    code, out, _ = run(capsys, "props", "--in", str(f), "--variant", "starred")
    assert [json.loads(s)["property"] for s in out.splitlines()][-1] == "VR"


def test_solve_p(capsys):
    code, out, _ = run(capsys, "solve-p", "--n", "1000", "--m", "1000", "--c", "0")
    d = json.loads(out)
    assert code == 0 and d["a_branch"] == "an_equals_1" and d["residual"] <= 1e-12
    code, _, err = run(capsys, "solve-p", "--n", "1000", "--m", "3574", "--c", "0")
    assert code == 1 and "3574" in err


def test_exp_writes_outputs(tmp_path, capsys):
    out_dir = tmp_path / "run"
    code, _, _ = run(capsys, "exp", "--kind", "joint_failure", "--n", "50,70", "--m-rule", "n",
                     "--c", "1", "--trials", "3", "--seed", "9", "--out", str(out_dir),
                     "--workers", "1")
    assert code == 0
    with open(out_dir / "records.csv") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 7
    summ = json.loads((out_dir / "summary.json").read_text())
    assert summ["config"]["n"] == [50, 70] and summ["complexity"]["loglog_slope"] is not None
