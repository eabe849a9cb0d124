import json

import pytest

from conelat.cli import main, parse_vector

LORENTZ3 = {"dim": 3, "norm": {"p": 2}, "cone": {"kind": "lorentz"}}
LINF3 = {"dim": 3, "norm": {"p": "inf"}, "cone": {"kind": "standard"}}


@pytest.fixture
def lorentz_file(tmp_path):
    p = tmp_path / "lorentz3.json"
    p.write_text(json.dumps(LORENTZ3))
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_quasisup_icecream(capsys, lorentz_file):
    code, out, _ = run(capsys, "quasisup", "--space", lorentz_file, "--x", "0,0,0", "--y", "[0,0,2]")
    assert code == 0
    res = json.loads(out)["result"]
    assert res["status"] == "unique"
    assert res["z"] == pytest.approx([1, 0, 1], abs=1e-9)


def test_quasisup_flat(capsys, tmp_path):
    prob = tmp_path / "p.json"
    prob.write_text(json.dumps({"space": LINF3, "operation": "quasisup", "x": [1, -1, 0], "y": [0, 0, 0]}))
    code, out, _ = run(capsys, "quasisup", "--problem", str(prob))
    assert code == 0
    assert json.loads(out)["result"]["status"] == "flat_minimum"


def test_infeasible_exit_code(capsys):
    space = json.dumps({"dim": 2, "cone": {"kind": "zero"}})
    code, out, _ = run(capsys, "quasisup", "--space", space, "--x", "1,0", "--y", "0,1")
    assert code == 2
    assert json.loads(out)["result"]["status"] == "infeasible"


@pytest.mark.parametrize(
    "argv",
    [
        ["quasisup", "--space", "{not json", "--x", "0,0,0", "--y", "0,0,2"],
        ["quasisup", "--space", "/nonexistent.json", "--x", "0,0,0", "--y", "0,0,2"],
        ["quasisup", "--space", json.dumps(LORENTZ3), "--x", "0,0", "--y", "0,0,2"],
        ["quasisup", "--space", json.dumps(LORENTZ3), "--x", "a,b,c", "--y", "0,0,2"],
        ["quasisup", "--space", json.dumps(LORENTZ3), "--x", "0,0,0"],
        ["quasisup", "--space", json.dumps(LORENTZ3), "--x", "0,0,0", "--y", "0,0,2", "--options", '{"bad": 1}'],
        ["quasisup", "--problem", json.dumps({"space": LORENTZ3, "x": [0, 0, 0], "y": [0, 0, 2], "extra": 1})],
        ["check", "normality", "--space", json.dumps(LORENTZ3), "--flavor", "sum-conormal", "--alpha", "1"],
        ["check", "normality", "--space", json.dumps(LORENTZ3), "--flavor", "normal"],
    ],
)
def test_schema_errors_exit_one_without_output(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 1
    assert out == ""
    assert err.startswith("error:")


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 1


def test_abs_and_posneg(capsys, lorentz_file):
    code, out, _ = run(capsys, "abs", "--space", lorentz_file, "--x=-1,2,0")
    assert code == 0
    z = json.loads(out)["abs"]["z"]
    assert sum(v * v for v in z) == pytest.approx(5.0)
    code, out, _ = run(capsys, "posneg", "--space", lorentz_file, "--x", "1,2,0")
    d = json.loads(out)
    p, m = d["pos"]["z"], d["neg"]["z"]
    assert [a - b for a, b in zip(p, m)] == pytest.approx([1, 2, 0], abs=1e-7)


def test_check_identities(capsys, lorentz_file):
    code, out, _ = run(capsys, "check", "identities", "--space", lorentz_file, "--samples", "20", "--seed", "0")
    d = json.loads(out)
    assert code == 0 and d["seed"] == 0 and d["report"]["pass"]


def test_check_normality_abs(capsys, lorentz_file):
    code, out, _ = run(capsys, "check", "normality", "--flavor", "abs-normal", "--alpha", "1", "--space", lorentz_file)
    assert json.loads(out)["report"]["verdict"] == "holds-on-sample"


def test_seed_from_environment(capsys, lorentz_file, monkeypatch):
    monkeypatch.setenv("CONELAT_SEED", "7")
    _, out, _ = run(capsys, "check", "normality", "--flavor", "normal", "--alpha", "1", "--space", lorentz_file)
    assert json.loads(out)["seed"] == 7
    _, out, _ = run(capsys, "quasisup", "--space", lorentz_file, "--x", "0,0,0", "--y", "0,0,2")
    assert json.loads(out)["options"]["seed"] == 7


def test_check_attained_and_operator(capsys, tmp_path):
    op = {"entries": [[2, 0, 0], [0, 1, 0], [0, 0, -1]], "domain": LORENTZ3, "codomain": LORENTZ3}
    f = tmp_path / "T.json"
    f.write_text(json.dumps(op))
    code, out, _ = run(capsys, "check", "attained", "--op", str(f))
    rep = json.loads(out)["report"]
    assert code == 0 and rep["pass"] and rep["positively_attained_gap"] <= 1e-4
    bad = dict(op, entries=[[1, 0, 0], [0, 2, 0], [0, 0, 2]])
    code, out, _ = run(capsys, "check", "operator", "--op", json.dumps(bad))
    assert json.loads(out)["report"]["positivity"]["positive"] is False
    code, out, err = run(capsys, "check", "attained", "--op", json.dumps(bad))
    assert code == 1 and "not positive" in err


def test_check_conormality_and_regularity(capsys, lorentz_file):
    code, out, _ = run(capsys, "check", "conormality", "--space", lorentz_file, "--flavor", "abs-conormal",
                       "--samples", "10", "--alpha", "1")
    assert json.loads(out)["report"]["within_alpha"]
    code, out, _ = run(capsys, "check", "regularity", "--space", lorentz_file, "--alpha", "1.5", "--samples", "10")
    assert json.loads(out)["report"]["kinds"]["ellis-grosberg-krein"]


def test_reproduce_case_and_unknown(capsys):
    code, out, _ = run(capsys, "reproduce", "--case", "ex-5.11")
    d = json.loads(out)
    assert code == 0 and d["cases"][0]["case_id"] == "ex-5.11" and d["pass"]
    code, out, err = run(capsys, "reproduce", "--case", "bogus")
    assert code == 1 and "unknown case" in err and out == ""


def test_reproduce_is_byte_stable(capsys):
    _, a, _ = run(capsys, "reproduce", "--case", "ex-5.10", "--case", "ex-5.13", "--no-timings", "--seed", "3")
    _, b, _ = run(capsys, "reproduce", "--case", "ex-5.10", "--case", "ex-5.13", "--no-timings", "--seed", "3")
    assert a == b


def test_quasisup_byte_stable(capsys, lorentz_file):
    argv = ["quasisup", "--space", json.dumps({"dim": 3, "cone": {"kind": "half_lorentz"}}), "--x=0.3,-1,2", "--y", "1,1,1"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b


def test_oracle_command(capsys, lorentz_file):
    code, out, _ = run(capsys, "oracle", "--space", lorentz_file, "--x", "0,0,0", "--y", "0,0,2", "--points", "41")
    res = json.loads(out)["result"]
    assert code == 0 and res["z"] == pytest.approx([1, 0, 1], abs=2 * res["grid_step"])


def test_parse_vector():
    assert parse_vector("1, -2,3.5").tolist() == [1, -2, 3.5]
    assert parse_vector("[1e-3]").tolist() == [1e-3]
    for bad in ("", "[[1]]", "1,nan", "[\"a\"]"):
        with pytest.raises(ValueError):
            parse_vector(bad)
