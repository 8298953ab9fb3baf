import json

import pytest

from tame_opt_lab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_ridge(capsys):
    code, out, _ = run(capsys, "solve", "--fixture", "ridge", "--c", "0,0,-1")
    doc = json.loads(out)
    assert code == 0 and doc["active"] == [0, 1] and max(abs(v) for v in doc["x"]) <= 1e-6


def test_diagnose_expect_ok(capsys):
    code, out, _ = run(capsys, "diagnose", "--fixture", "ridge", "--c", "0,0,-1", "--expect", "identifiable")
    assert code == 0 and json.loads(out)["overall"] == "identifiable"


def test_diagnose_expect_fails_with_verdict_code(capsys):
    code, out, _ = run(capsys, "diagnose", "--fixture", "bad_square", "--c", "0,0,-1",
                       "--expect", "identifiable", "--format", "csv")
    assert code == 3 and out.startswith("index,c1,c2,c3,verdict") and "LICQ" in out


def test_input_errors_exit_1(capsys):
    assert run(capsys, "solve", "--fixture", "ridge", "--c", "1,2")[0] == 1
    assert run(capsys, "solve", "--c", "1,2,3")[0] == 1
    assert run(capsys, "solve", "--fixture", "nope", "--c", "1,2,3")[0] == 1
    assert run(capsys, "solve", "--fixture", "ridge", "--c", "a,b,c")[0] == 1


def test_empty_interior_exit_1(tmp_path, capsys):
    body = {"n": 1, "radius": 1.0, "constraints": [{"terms": [{"exps": [1], "coef": 1.0}]},
                                                   {"terms": [{"exps": [1], "coef": -1.0}]}]}
    path = tmp_path / "flat.json"
    path.write_text(json.dumps(body))
    assert run(capsys, "solve", "--body", str(path), "--c", "1")[0] == 1


def test_numeric_failure_exit_2(capsys, monkeypatch):
    from tame_opt_lab import cli
    from tame_opt_lab.errors import ConvergenceError

    def boom(*a, **k):
        raise ConvergenceError("forced")
    monkeypatch.setattr(cli, "maximize_linear", boom)
    assert run(capsys, "solve", "--fixture", "ball", "--c", "1,0,0")[0] == 2


def test_fixtures_list_and_dump(capsys, tmp_path):
    code, out, _ = run(capsys, "fixtures", "list")
    assert code == 0 and out.split() == ["ball", "box", "simplex", "ridge", "nc_fail", "bad_square"]
    target = tmp_path / "ridge.json"
    assert run(capsys, "fixtures", "dump", "ridge", "--out", str(target))[0] == 0
    doc = json.loads(target.read_text())
    assert doc["n"] == 3 and len(doc["constraints"]) == 2
    code, out, _ = run(capsys, "solve", "--body", str(target), "--c", "0,0,-1")
    assert code == 0


def test_survey_and_probe(capsys, tmp_path):
    out_csv = tmp_path / "s.csv"
    assert run(capsys, "survey", "--fixture", "ball", "--samples", "5", "--format", "csv", "--out", str(out_csv))[0] == 0
    assert len(out_csv.read_text().splitlines()) == 6
    code, out, _ = run(capsys, "probe", "--fixture", "ball", "--from", "1,0,0", "--to", "0,1,0", "--steps", "3")
    assert code == 0 and json.loads(out)["changes"] == []


def test_help_exits_zero(capsys):
    with pytest.raises(SystemExit) as exc:
        raise SystemExit(main(["--help"]))
    assert exc.value.code == 0
