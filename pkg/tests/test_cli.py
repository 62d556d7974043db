import json
from fractions import Fraction

import pytest

from stackel import dump, example_fig1, gen_balanced
from stackel.cli import main
from stackel.geometry import Hull2D


@pytest.fixture
def fig1(tmp_path):
    path = tmp_path / "fig1.json"
    assert main(["gen", "example-fig1", "--out", str(path)]) == 0
    return path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_sefce(fig1, capsys):
    code, out, err = run(capsys, "solve", fig1, "--algorithm", "sefce-tree")
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["value"] == "3/2"
    assert doc["schema"] == 1
    assert "3/2" in err


@pytest.mark.parametrize("algorithm", ["sefce-lp", "fptas-behavioral", "fptas-pure", "minmax"])
def test_other_algorithms(fig1, capsys, algorithm):
    code, out, _ = run(capsys, "solve", fig1, "--algorithm", algorithm, "--epsilon", "1/10")
    assert code == 0 and json.loads(out)["result"]["value"]


def test_output_is_deterministic(fig1, capsys):
    first = run(capsys, "solve", fig1, "--algorithm", "sefce-lp")[1]
    second = run(capsys, "solve", fig1, "--algorithm", "sefce-lp")[1]
    assert first == second


def test_cyclic_game_rejected(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"graph": "dag", "root": 0, "nodes": [
        {"id": 0, "kind": "leader", "actions": [["a", 1], ["b", 1]]},
        {"id": 1, "kind": "follower", "actions": [["back", 0], ["b", 0]]}]}))
    code, _, err = run(capsys, "validate", bad)
    assert code == 2 and "cycle" in err


def test_unsupported_class(fig1, tmp_path, capsys):
    path = tmp_path / "chance.json"
    assert main(["gen", "random", "--seed", "1", "--nodes", "4", "--chance-fraction", "1",
                 "--out", str(path)]) == 0
    assert run(capsys, "solve", path, "--algorithm", "pure-dag")[0] == 2


def test_usage_errors(fig1, capsys):
    assert run(capsys, "solve", fig1)[0] == 1
    assert run(capsys, "solve", fig1, "--algorithm", "nope")[0] == 1
    assert run(capsys, "solve", fig1, "--algorithm", "fptas-pure", "--epsilon", "x")[0] == 1


def test_budget_refusal(tmp_path, capsys, monkeypatch):
    path = tmp_path / "big.json"
    dump(gen_balanced(3, 3), path)
    monkeypatch.setenv("STACKEL_BUDGET_NODES", "3")
    assert run(capsys, "oracle", path, "--method", "pure")[0] == 3


def test_oracle(fig1, capsys):
    code, out, _ = run(capsys, "oracle", fig1, "--method", "sefce")
    assert code == 0 and json.loads(out)["result"]["value"] == "3/2"


def _rows(path):
    return [tuple(Fraction(x) for x in line.split(",")) for line in path.read_text().split()]


def test_single_leaf_hull(tmp_path, capsys):
    game = tmp_path / "leaf.json"
    game.write_text(json.dumps({"graph": "tree", "root": 0,
                                "nodes": [{"id": 0, "kind": "leaf", "u": ["1", "2"]}]}))
    out = tmp_path / "hulls"
    assert run(capsys, "hull", game, "--out", out)[0] == 0
    assert _rows(out / "node0.csv") == [(2, 1)]


def test_root_hull(fig1, tmp_path, capsys):
    out = tmp_path / "hulls"
    assert run(capsys, "hull", fig1, "--out", out)[0] == 0
    g = example_fig1()
    rows = _rows(out / "node0.csv")
    assert len(rows) <= len(g.leaves())
    assert (2, Fraction(3, 2)) in rows
    assert Hull2D.from_points(rows).contains((2, Fraction(3, 2)))


def test_svg_hulls(fig1, tmp_path, capsys):
    out = tmp_path / "svg"
    assert run(capsys, "hull", fig1, "--out", out, "--format", "svg")[0] == 0
    assert (out / "node0.svg").read_text().startswith("<svg")


def test_gen_knapsack(tmp_path, capsys):
    path = tmp_path / "k.json"
    assert main(["gen", "knapsack", "--items", "1:1,1:1", "--budget", "1",
                 "--out", str(path)]) == 0
    code, out, _ = run(capsys, "oracle", path, "--method", "reduction")
    assert code == 0 and json.loads(out)["result"]["value"] == "1"


def test_selftest_subset(capsys):
    code, _, err = run(capsys, "selftest", "--criteria", "1")
    assert code == 0 and "criterion 1 [PASS]" in err
