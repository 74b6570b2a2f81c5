import json

import pytest

from qgt.cli import run


def _report(capsys, argv, code=0):
    assert run(argv) == code
    out = capsys.readouterr()
    return json.loads(out.out), out.err


def test_char_example(capsys):
    rep, _ = _report(capsys, ["char", "--family", "C", "--signature", "1", "--points", "2", "--q", "1/2"])
    assert rep["rows"][0]["value"] == "5/2"
    assert rep["verdict"] == "pass"
    assert rep["config"]["q"] == "1/2" and rep["config"]["mode"] == "exact"


def test_char_principal_and_complex(capsys):
    rep, _ = _report(capsys, ["char", "--family", "A", "--signature", "1,0", "--principal"])
    assert rep["rows"][0]["value"] == "3/2"
    rep, _ = _report(capsys, ["char", "--family", "A", "--signature", "1,0", "--points", "1j,1"])
    re, im = rep["rows"][0]["value"]
    assert float(re) == pytest.approx(1) and float(im) == pytest.approx(1)


def test_kernel_example(capsys):
    rep, _ = _report(capsys, ["kernel", "--graph", "symA", "--sigma", "+", "--signature", "1,0", "--q", "1/2"])
    assert {r["mu"]: r["mass"] for r in rep["rows"]} == {"0": "1/3", "1": "2/3"}


def test_kernel_bc_and_multistep(capsys):
    rep, _ = _report(capsys, ["kernel", "--graph", "bc", "--group", "C", "--signature", "1,0"])
    assert {r["mu"]: r["mass"] for r in rep["rows"]} == {"0": "17/27", "1": "10/27"}
    rep, _ = _report(capsys, ["kernel", "--signature", "2,2,2,2", "--k", "2"])
    assert rep["rows"] == [{"mu": "2,2", "mass": "1"}]


def test_bc_type_b_needs_sqrt(capsys):
    assert run(["kernel", "--graph", "bc", "--group", "B", "--signature", "1,0"]) == 2
    out = capsys.readouterr()
    assert out.out == "" and "--sqrt-q" in out.err
    rep, _ = _report(capsys, ["kernel", "--graph", "bc", "--group", "B", "--signature", "1,0",
                              "--q", "1/4", "--sqrt-q", "1/2"])
    assert len(rep["rows"]) == 2


def test_sample(capsys):
    argv = ["sample", "--signature", "2,1,0,0", "--k", "2", "--chains", "50", "--seed", "3"]
    rep, _ = _report(capsys, argv)
    assert sum(r["count"] for r in rep["rows"]) == 50
    rep, _ = _report(capsys, argv[:-4] + ["--chains", "2", "--keep-levels"])
    assert rep["rows"][0]["levels"][0] == "2,1,0,0" and len(rep["rows"][0]["levels"]) == 3


def test_phi(capsys):
    rep, _ = _report(capsys, ["phi", "--family", "A", "--point", "0:1:3@1", "--x", "1.3", "--mode", "float"])
    re, im = rep["rows"][0]["value"]
    assert abs(float(re) - 1.2250500872302925) < 1e-9 and abs(float(im)) < 1e-12
    rep, _ = _report(capsys, ["phi", "--family", "C", "--point", "0,1,2", "--x", "1.3,0.8", "--mode", "float"])
    assert abs(float(rep["rows"][0]["value"][0]) - 0.4173696653700661) < 1e-9


def test_verify_small(capsys):
    rep, _ = _report(capsys, ["verify", "--suite", "contour-A", "--max-n", "3", "--q", "1/2"])
    assert rep["verdict"] == "pass"
    assert all(r["failures"] == 0 for r in rep["rows"])


def test_experiment_failure_exit_code(capsys):
    rep, _ = _report(capsys, ["experiment", "convergence", "--family", "C", "--point", "0,1,2",
                              "--N-list", "4,6"], code=1)
    assert rep["verdict"] == "fail"


def test_numeric_error_is_reported(capsys):
    rep, err = _report(capsys, ["phi", "--family", "A", "--point", "0:1:3@1", "--x", "2.0005", "--mode", "float"],
                       code=1)
    assert rep["verdict"].startswith("error: PoleNeighborhood")
    assert "PoleNeighborhood" in err


@pytest.mark.parametrize("argv,flag", [
    (["char", "--family", "A", "--signature", "1,x", "--points", "1,2"], "--signature"),
    (["char", "--family", "A", "--signature", "1,0", "--points", "1"], "--points"),
    (["kernel", "--signature", "1,0", "--q", "3/2"], "--q"),
    (["kernel", "--signature", "1,0", "--sigma", "+x"], "--sigma"),
    (["kernel", "--graph", "bc", "--signature", "1,0"], "--group"),
    (["experiment", "lln", "--family", "A", "--point", "nonsense"], "--point"),
])
def test_usage_errors_name_the_flag(argv, flag, capsys):
    assert run(argv) == 2
    assert flag in capsys.readouterr().err


def test_unknown_subcommand(capsys):
    assert run(["frobnicate"]) == 2
    assert run(["--help"]) == 0


def test_csv_and_file_output(tmp_path, capsys):
    path = tmp_path / "r.csv"
    argv = ["kernel", "--signature", "1,0", "--sigma", "+", "--format", "csv", "--output", str(path)]
    assert run(argv) == 0
    text = path.read_text()
    assert "# verdict=pass" in text and "mass,mu" in text and '1/3,0' in text
    assert capsys.readouterr().out == ""


def test_determinism(tmp_path):
    argv = ["experiment", "concentration", "--family", "C", "--point", "0,1,2", "--k", "2",
            "--N-list", "5,6", "--samples", "3000", "--seed", "4"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(argv + ["--output", str(a)]) == 0
    assert run(argv + ["--output", str(b), "--threads", "1"]) == 0
    assert a.read_bytes() == b.read_bytes()
