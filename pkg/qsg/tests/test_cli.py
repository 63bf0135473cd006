# test_cli.py

import json
import os
from unittest.mock import patch

import pytest

from qsg import data_storage as ds
from qsg.cli import EXIT_BUDGET, EXIT_OK, EXIT_USAGE, EXIT_VIOLATED, dispatch
from qsg.pit import Circuit
from qsg.qform import qform_from_monomials

Q1 = {"n": 4, "terms": [[0, 1, 1], [2, 3, 1]]}
Q2 = {"n": 4, "terms": [[0, 1, 1], [2, 3, -1]]}
Q3 = {"n": 4, "terms": [[0, 3, 1]]}
Q4 = {"n": 4, "terms": [[1, 2, 1]]}


@pytest.fixture
def write(tmp_path):
    def _write(name, data):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)
    return _write


def run(capsys, argv):
    code = dispatch(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip().startswith("{") else out)


def test_rank_and_ms(capsys, write):
    form = write("xy.json", {"n": 3, "terms": [[0, 1, 1]]})
    code, report = run(capsys, ["rank", "--form", form])
    assert code == EXIT_OK
    assert report == {"gram_rank": 2, "rank_s": 1}
    code, report = run(capsys, ["ms", "--form", form])
    assert report["dim"] == 2
    assert report["minimal_space"]["basis"] == [["1", "0", "0"], ["0", "1", "0"]]


def test_text_format(capsys, write):
    form = write("xy.json", {"n": 2, "terms": [[0, 1, 1]]})
    code, out = run(capsys, ["rank", "--form", form, "--format", "text"])
    assert code == EXIT_OK
    assert out.splitlines() == ["gram_rank: 2", "rank_s: 1"]


def test_report_to_file(capsys, write, tmp_path):
    form = write("xy.json", {"n": 2, "terms": [[0, 1, 1]]})
    target = tmp_path / "reports" / "rank.json"
    assert dispatch(["rank", "--form", form, "--out", str(target)]) == EXIT_OK
    assert capsys.readouterr().out == ""
    assert json.loads(target.read_text())["rank_s"] == 1


def test_factor_errors(capsys, write, tmp_path):
    zero = write("zero.json", {"n": 2, "terms": []})
    code, report = run(capsys, ["factor", "--form", zero])
    assert code == EXIT_USAGE
    assert report["error"] == "InputError"
    code, report = run(capsys, ["factor", "--form", str(tmp_path / "missing.json")])
    assert code == EXIT_USAGE


def test_usage_errors(capsys):
    assert dispatch(["rank"]) == EXIT_USAGE
    assert dispatch(["triple", "gen", "--family", "lines"]) == EXIT_USAGE
    capsys.readouterr()


@pytest.mark.parametrize("flag,value", [("--delta", "0"), ("--delta", "3/2"), ("--budget-degree", "0")])
def test_run_config_rejects_out_of_range(capsys, write, flag, value):
    tri = write("tri.json", {"points": [[0, 0], [1, 0], [0, 1]]})
    assert dispatch(["sg", "check", "--in", tri, flag, value]) == EXIT_USAGE
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "invalid arguments" in captured.err


def test_radical(capsys, write):
    gens = write("gens.json", [Q1, Q2])
    code, report = run(capsys, ["radical", "--gens", gens, "--f", write("f.json", [Q3, Q4])])
    assert code == EXIT_OK and report["member"] is True
    code, report = run(capsys, ["radical", "--gens", gens, "--f", write("g.json", [Q3])])
    assert code == EXIT_VIOLATED and report["member"] is False


def test_budget_exit_code_restores_env(capsys, write, monkeypatch):
    monkeypatch.delenv("QSG_BUDGET_DEGREE", raising=False)
    gens = write("gens.json", [Q1, Q2])
    argv = ["radical", "--gens", gens, "--f", write("f.json", [Q3, Q4]), "--budget-degree", "3"]
    code, report = run(capsys, argv)
    assert code == EXIT_BUDGET
    assert report["error"] == "BudgetExceeded"
    assert "QSG_BUDGET_DEGREE" not in os.environ


def test_witness(capsys, write):
    code, report = run(capsys, ["witness", "--gens", write("gens.json", [Q1, Q2]),
                                "--factors", write("factors.json", [Q3, Q4])])
    assert code == EXIT_OK
    assert report["subset"] == [0, 1]


def test_classify_squares(capsys, write):
    a = write("a.json", {"n": 2, "terms": [[0, 0, 1]]})
    b = write("b.json", {"n": 2, "terms": [[1, 1, 1]]})
    third = write("third.json", [{"n": 2, "terms": [[0, 0, 1], [0, 1, 2], [1, 1, 1]]}])
    code, report = run(capsys, ["classify", "--a", a, "--b", b, "--third", third])
    assert code == EXIT_OK
    assert "ii" in report["holds"], "squares of two lines span a reducible pencil"
    assert report["cases"]["case_ii"] is not None


def test_triple_pipeline(capsys, tmp_path):
    path = str(tmp_path / "pencil.json")
    code = dispatch(["triple", "gen", "--family", "pencil", "--params", '{"n": 4, "sizes": [1, 2, 1]}',
                     "--seed", "7", "--out", path])
    assert code == EXIT_OK
    assert json.loads(open(path).read())["meta"]["family"] == "pencil"
    code, report = run(capsys, ["triple", "validate", "--in", path])
    assert code == EXIT_OK and report["all_ok"]
    code, report = run(capsys, ["triple", "assert", "--in", path])
    assert code == EXIT_OK
    assert report["result"]["measured"] == 2


def test_corrupted_triple_is_a_violation(capsys, tmp_path):
    path = str(tmp_path / "bad.json")
    dispatch(["triple", "gen", "--family", "corrupted", "--params", '{"mutation": "outlier_square"}',
              "--out", path])
    code, report = run(capsys, ["triple", "validate", "--in", path])
    assert code == EXIT_VIOLATED
    assert not report["all_ok"]
    code, report = run(capsys, ["triple", "stats", "--in", path])
    assert code == EXIT_VIOLATED and report["violations"]


def test_triple_gen_rejects_bad_params(capsys):
    code, report = run(capsys, ["triple", "gen", "--family", "pencil", "--params", "{n: 4}"])
    assert code == EXIT_USAGE
    assert "params" in report["message"]


def test_sg_check(capsys, write):
    code, report = run(capsys, ["sg", "check", "--in", write("tri.json", {"points": [[0, 0], [1, 0], [0, 1]]})])
    assert code == EXIT_OK
    assert report["ordinary_lines"] == [[0, 1], [0, 2], [1, 2]]
    assert report["sg_bound"] is None


def test_ek_check(capsys, write):
    path = write("ek.json", {"sets": [[[1, 0]], [[0, 1]], [[1, 1]]]})
    code, report = run(capsys, ["ek", "check", "--in", path])
    assert code == EXIT_OK
    assert report["bound"]["measured"] == 2 and report["bound"]["bound"] == 4
    path = write("bad.json", {"sets": [[[1, 0, 0]], [[0, 1, 0]], [[0, 0, 1]]]})
    code, report = run(capsys, ["ek", "check", "--in", path])
    assert code == EXIT_VIOLATED
    assert report["condition"]["violation"] == [[0, 0], [1, 0]]


def test_pit_commands(capsys, write):
    n = 3
    xy, xx, yy, zz = (qform_from_monomials(n, {k: 1}) for k in ((0, 1), (0, 0), (1, 1), (2, 2)))
    c = Circuit(n, [[xy, xy], [-xx, yy], [zz, zz]])
    path = write("circuit.json", ds.circuit_to_dict(c))
    code, report = run(capsys, ["pit", "run", "--in", path])
    assert code == EXIT_OK
    assert report["verdict"]["zero"] is False
    code, assisted = run(capsys, ["pit", "run", "--in", path, "--assisted"])
    assert assisted["verdict"] == report["verdict"]
    code, report = run(capsys, ["pit", "oracle", "--in", path])
    assert report["zero"] is False


def test_pit_hitting_set_stream(capsys, tmp_path):
    target = tmp_path / "points.jsonl"
    code, report = run(capsys, ["pit", "hitting-set", "--n", "2", "--d", "2", "--k", "1", "--out", str(target)])
    assert code == EXIT_OK
    assert report["size"] == report["written"] == 15
    with open(target) as f:
        assert len(ds.read_points(f)) == 15


@patch("qsg.selftest.run_selftest")
def test_selftest_exit_code(mock_run, capsys):
    mock_run.return_value = {"seed": 42, "quick": True, "criteria": [], "passed": False}
    code, report = run(capsys, ["selftest", "--quick"])
    assert code == EXIT_VIOLATED
    mock_run.assert_called_once_with(42, quick=True)
    mock_run.return_value = dict(mock_run.return_value, passed=True)
    assert dispatch(["selftest"]) == EXIT_OK


if __name__ == "__main__":
    pytest.main([__file__])
