from __future__ import annotations

import csv
import json
import subprocess
import sys

import pytest

from editdist.cli import main
from editdist.dendrogram import Dendrogram

from helpers import appendix_trees


@pytest.fixture
def tree_files(tmp_path):
    t, t2 = appendix_trees()
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    a.write_text(json.dumps(t.to_json()))
    b.write_text(json.dumps(t2.to_json()))
    return a, b


def run(capsys, *argv):
    code = main([str(x) for x in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_dist(capsys, tree_files):
    code, out, _ = run(capsys, "dist", *tree_files)
    assert code == 0
    res = json.loads(out)
    assert res["distance"] == 2.0
    assert res["problems"] > 0


def test_dist_with_newick_and_lp_dump(capsys, tmp_path):
    a, b = tmp_path / "a.nwk", tmp_path / "b.nwk"
    a.write_text("((a:1,b:1)d:1,c:5)r;")
    b.write_text("((x:1,y:2)z:3,w:2)q;")
    code, out, _ = run(capsys, "dist", a, b, "--lp-dir", tmp_path / "lp", "--workers", 1)
    assert code == 0 and json.loads(out)["distance"] == 2.0
    assert list((tmp_path / "lp").glob("*.lp"))


def test_matrix(capsys, tree_files, tmp_path):
    code, out, _ = run(capsys, "matrix", tmp_path)
    res = json.loads(out)
    assert res["names"] == ["a.json", "b.json"]
    assert res["matrix"] == [[0.0, 2.0], [2.0, 0.0]]


def test_mergetree_writes_a_loadable_tree(capsys, tmp_path):
    samples = tmp_path / "f.csv"
    samples.write_text("x,y\n0,1\n1,0\n2,2\n3,-1\n4,3\n")
    out = tmp_path / "tree.json"
    code, _, _ = run(capsys, "mergetree", samples, "-o", out)
    assert code == 0
    t = Dendrogram.from_json(json.loads(out.read_text()))
    assert sorted(t.weights.values()) == [2.0, 3.0]


def test_linkage(capsys, tmp_path):
    pts = tmp_path / "p.csv"
    pts.write_text("0\n1\n3\n")
    code, out, _ = run(capsys, "linkage", pts)
    assert Dendrogram.from_json(json.loads(out)).norm() == 5.0
    mat = tmp_path / "d.csv"
    mat.write_text("0,2,5\n2,0,4\n5,4,0\n")
    code, out, _ = run(capsys, "linkage", mat, "--precomputed")
    assert code == 0 and Dendrogram.from_json(json.loads(out)).norm() == 10.0


def test_random_is_seeded(capsys):
    _, first, _ = run(capsys, "random", "--leaves", 6, "--seed", 5)
    _, second, _ = run(capsys, "random", "--leaves", 6, "--seed", 5)
    assert first == second
    assert len(Dendrogram.from_json(json.loads(first)).leaves) == 6


def test_validate_mapping(capsys, tree_files, tmp_path):
    m = tmp_path / "m.json"
    m.write_text(json.dumps([["couple", "a", "a2"], ["couple", "b", "b2"], ["couple", "d", "d2"],
                             ["couple", "c", "c2"]]))  # fmt: skip
    code, out, _ = run(capsys, "validate-mapping", *tree_files, m)
    res = json.loads(out)
    assert res["valid"] and res["cost"] == 6.0  # |0| + |1-2| + |1-3| + |5-2|
    m.write_text(json.dumps([["couple", "a", "a2"]]))
    _, out, _ = run(capsys, "validate-mapping", *tree_files, m)
    res = json.loads(out)
    assert not res["valid"] and res["problems"]


def test_bench_csv(capsys, tmp_path):
    out = tmp_path / "b.csv"
    code, _, _ = run(capsys, "-v", "bench", "--n-min", 3, "--n-max", 4, "--trials", 2, "-o", out)
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 4
    code, text, _ = run(capsys, "bench", "--n-min", 3, "--n-max", 3, "--trials", 1)
    assert text.startswith("leaves,trial,")


def test_errors_exit_with_status_2(capsys, tmp_path):
    code, _, err = run(capsys, "dist", tmp_path / "missing.json", tmp_path / "other.json")
    assert code == 2 and err.startswith("editdist: error:")
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2,3\n")
    code, _, err = run(capsys, "mergetree", bad)
    assert code == 2


def test_export_import_round_trip(capsys, tmp_path):
    out = tmp_path / "t.json"
    run(capsys, "random", "--leaves", 5, "--seed", 1, "-o", out)
    code, res, _ = run(capsys, "dist", out, out)
    assert json.loads(res)["distance"] == 0.0


def test_console_entry_point(tree_files):
    proc = subprocess.run(
        [sys.executable, "-m", "editdist.cli", "dist", *map(str, tree_files)],
        capture_output=True,
        text=True,
        check=True,
    )
    assert json.loads(proc.stdout)["distance"] == 2.0
