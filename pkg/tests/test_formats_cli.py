import json
import random
import subprocess
import sys
from fractions import Fraction

import pytest

from urysohn import formats
from urysohn.builder import build_approx, kuratowski_embed
from urysohn.cli import main
from urysohn.core_metric import FiniteMetricSpace, random_metric_space

F = Fraction
S2 = [F(1, 2), F(1)]


def write_space(path, X):
    path.write_text(formats.dumps(formats.space_to_dict(X)))
    return str(path)


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_space_round_trip():
    X = random_metric_space(6, [F(k, 7) for k in range(1, 8)], random.Random(3))
    obj = json.loads(formats.dumps(formats.space_to_dict(X)))
    assert formats.space_from_dict(obj) == X
    assert all(isinstance(v, str) for row in obj["d"] for v in row)


def test_approx_and_steps_round_trip():
    A = build_approx(S2, rounds=3, budget=2, seed=4)
    B = formats.approx_from_dict(json.loads(formats.dumps(formats.approx_to_dict(A))))
    assert (B.space, B.alphabet, B.rounds, B.budget, B.seed) == (A.space, A.alphabet, 3, 2, 4)
    assert B.added_per_round == A.added_per_round
    E = kuratowski_embed(A.space, 2)
    assert formats.steps_from_dict(json.loads(formats.dumps(formats.steps_to_dict(E)))) == E


@pytest.mark.parametrize(
    "obj",
    [
        {"n": 2, "d": [["0", 0.5], ["1/2", "0"]]},
        {"n": 2, "d": [["0", "1/2"], ["1/3", "0"]]},
        {"n": 3, "d": [["0", "1/4", "1"], ["1/4", "0", "1/4"], ["1", "1/4", "0"]]},
        {"n": 3, "d": [["0", "1"], ["1", "0"]]},
        {"d": []},
        {"n": 2, "d": [["0", "abc"], ["abc", "0"]]},
    ],
)
def test_bad_spaces_rejected(obj):
    with pytest.raises(ValueError):
        formats.space_from_dict(obj)


def test_diameter_above_one_rejected():
    with pytest.raises(ValueError):
        formats.space_from_dict({"n": 2, "d": [["0", "3/2"], ["3/2", "0"]]})


def test_fourvalues(capsys):
    assert run(["fourvalues", "--set", "1,2,3"], capsys)[:2] == (0, "true\n")
    code, out, err = run(["fourvalues", "--set", "2,4,7"], capsys)
    assert (code, out) == (0, "false 2 2 4 7 4\n")
    assert err.startswith("config {")


def test_classify(tmp_path, capsys):
    code, out, _ = run(["classify", "--m", "2"], capsys)
    assert code == 0
    assert out.splitlines() == ["m,pattern_id,representative,four_values,canonical",
                                "2,0,1 2,true,true", "2,1,1 3,true,true"]
    js = tmp_path / "c.json"
    assert run(["--threads", "2", "classify", "--m", "3", "--json", str(js)], capsys)[0] == 0
    assert json.loads(js.read_text())["four_values"] == 6


def test_build_and_check(tmp_path, capsys):
    out = tmp_path / "s2.json"
    argv = ["build", "--alphabet", "1/2,1", "--rounds", "4", "--budget", "2", "--out", str(out)]
    assert run(argv, capsys)[0] == 0
    first = out.read_bytes()
    assert run(argv, capsys)[0] == 0
    assert out.read_bytes() == first
    A = formats.load_any(str(out))
    assert A.n == 15 and A.added_per_round == [2, 6, 5, 1]
    code, stdout, _ = run(["check-extension", "--in", str(out), "--k", "2"], capsys)
    assert (code, stdout) == (0, "unrealized=0\n")


def test_check_extension_violation(tmp_path, capsys):
    out = tmp_path / "thin.json"
    run(["build", "--alphabet", "1/3,2/3,1", "--rounds", "1", "--budget", "1", "--out", str(out)], capsys)
    code, stdout, err = run(["check-extension", "--in", str(out), "--k", "2"], capsys)
    assert code == 1 and stdout.startswith("unrealized=")
    cx = json.loads((tmp_path / "thin.counterexample.json").read_text())
    assert cx["k"] == 2 and cx["unrealized"]


def test_check_extension_plain_space_needs_alphabet(tmp_path, capsys):
    p = write_space(tmp_path / "x.json", FiniteMetricSpace([[0, 1], [1, 0]]))
    assert run(["check-extension", "--in", p, "--k", "1"], capsys)[0] == 2
    assert run(["check-extension", "--in", p, "--k", "1", "--alphabet", "1"], capsys)[0] == 0


def test_build_cap_exhausted(capsys):
    argv = ["build", "--alphabet", "1/3,2/3,1", "--rounds", "5", "--budget", "2", "--size-cap", "30"]
    code, _, err = run(argv, capsys)
    assert code == 1 and "budget exhausted" in err


def test_build_rejects_bad_alphabet(capsys):
    assert run(["build", "--alphabet", "2,4,7", "--rounds", "1", "--budget", "1"], capsys)[0] == 2


def test_ceil_and_collapse(tmp_path, capsys):
    X = FiniteMetricSpace([[0, F(3, 10), F(3, 10)], [F(3, 10), 0, F(11, 20)], [F(3, 10), F(11, 20), 0]])
    p = write_space(tmp_path / "x.json", X)
    code, out, _ = run(["ceil", "--in", p, "--m", "2"], capsys)
    assert code == 0
    assert json.loads(out)["d"] == [["0", "1/2", "1/2"], ["1/2", "0", "1"], ["1/2", "1", "0"]]
    fine = FiniteMetricSpace([[0, F(5, 12)], [F(5, 12), 0]])
    q = write_space(tmp_path / "f.json", fine)
    code, out, _ = run(["collapse", "--in", q, "--m", "2"], capsys)
    assert json.loads(out)["d"][0][1] == "1/2"
    assert run(["collapse", "--in", p, "--m", "2"], capsys)[0] == 2


def test_dense_copy(tmp_path, capsys):
    A = build_approx(S2, rounds=6, budget=2).space
    p = write_space(tmp_path / "a.json", A)
    code, out, _ = run(["dense-copy", "--in", p, "--m", "2", "--steps", "4"], capsys)
    assert code == 0 and out.splitlines()[0] == "ambient_index,distance_to_copy,covered"
    code, _, _ = run(["dense-copy", "--in", p, "--m", "1", "--steps", "5"], capsys)
    assert code == 1
    cx = json.loads((tmp_path / "a.counterexample.json").read_text())
    assert cx["diverged"].startswith("step 3")


def test_hedgehog(tmp_path, capsys):
    fine = random_metric_space(6, [F(k, 12) for k in range(1, 13)], random.Random(1))
    p = write_space(tmp_path / "fine.json", fine)
    g, c = tmp_path / "g.json", tmp_path / "c.csv"
    argv = ["hedgehog", "--fine", p, "--m", "2", "--max-tree", "3", "--verify", "--graph", str(g), "--census", str(c)]
    code, out, _ = run(argv, capsys)
    assert code == 0 and json.loads(out)["ok"] is True
    graph = json.loads(g.read_text())
    assert {v["kind"] for v in graph["vertices"]} == {"point", "node"}
    assert all(isinstance(e[2], str) for e in graph["edges"])
    assert c.read_text().splitlines()[0] == "cycle_id,size,shape,vertices,ok,problems"
    code, out, _ = run(["hedgehog", "--fine", p, "--m", "2", "--max-tree", "3"], capsys)
    assert code == 0 and json.loads(out)["points"] == 6


def test_experiment_replay(tmp_path, capsys):
    A = build_approx(S2, rounds=6, budget=2).space
    p = write_space(tmp_path / "a.json", A)
    tri = lambda a, b, c: formats.space_to_dict(FiniteMetricSpace([[0, a, b], [a, 0, c], [b, c, 0]]))
    t = tmp_path / "t.json"
    t.write_text(json.dumps({"targets": [tri(F(1, 2), F(1, 2), F(1, 2)), tri(F(1), F(1), F(1))]}))
    outs = []
    for name in ("r1.csv", "r2.csv"):
        argv = ["experiment", "--in", p, "--targets", str(t), "--eps", "0", "--k", "2",
                "--seeds", "0..9", "--out", str(tmp_path / name)]
        assert run(argv, capsys)[0] == 0
        outs.append((tmp_path / name).read_bytes())
    assert outs[0] == outs[1]
    lines = outs[0].decode().splitlines()
    assert lines[0] == "seed,coloring_kind,k,eps,target_id,found,color,witness_size,millis"
    assert len(lines) == 1 + 10 * 3 * 2


def test_embed_cm(tmp_path, capsys):
    X = FiniteMetricSpace([[0, F(1, 2)], [F(1, 2), 0]])
    p = write_space(tmp_path / "x.json", X)
    code, out, _ = run(["embed-cm", "--in", p, "--m", "2"], capsys)
    assert code == 0 and json.loads(out)["functions"] == [["0", "1/2"], ["1/2", "0"]]
    assert run(["embed-cm", "--in", p, "--m", "3"], capsys)[0] == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["nonsense"],
        ["classify"],
        ["fourvalues", "--set", "0.5"],
        ["build", "--alphabet", "1/2", "--rounds", "1", "--budget", "1", "--bogus"],
        ["experiment", "--in", "x", "--targets", "y", "--eps", "0", "--k", "2", "--seeds", "5..1"],
    ],
)
def test_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as e:
        main(argv)
    assert e.value.code == 2


def test_missing_file(capsys):
    assert run(["ceil", "--in", "/nonexistent.json", "--m", "2"], capsys)[0] == 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "urysohn", "fourvalues", "--set", "1,3"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout == "true\n"
