import json
import subprocess
import sys

import numpy as np
import pytest

from riesz_lab import cli, dens
from riesz_lab.params import RieszParams


def run(tmp_path, *argv):
    out = tmp_path / "out.txt"
    code = cli.run(list(argv) + ["--output", str(out)])
    return code, out.read_text() if out.exists() else ""


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def test_sample_csv_layout(tmp_path):
    code, text = run(tmp_path, "sample", "--dist", "kotzriesz-II", "--n", "4", "--seed", "3")
    assert code == 0
    lines = text.splitlines()
    assert lines[0].startswith("# dist=kotzriesz-II seed=3 stream=0")
    assert lines[1].split(",")[:2] == ["y_1_1_re", "y_1_2_re"]
    assert len(lines) == 2 + 4
    assert all(len(r.split(",")) == 6 for r in lines[2:])


def test_sample_complex_jsonl_parses(tmp_path):
    params = write(tmp_path, "p.json", {"a": 3, "kappa": [1, 0], "beta": 2})
    code, text = run(tmp_path, "sample", "--dist", "riesz", "--params", params, "--n", "3",
                     "--format", "jsonl")
    assert code == 0
    rows = [json.loads(r) for r in text.splitlines()[1:]]
    assert len(rows) == 3 and set(rows[0]) == {"n", "m", "beta", "re", "im"}
    # Hermitian: imaginary diagonal vanishes
    assert rows[0]["im"][0][0] == 0.0


def test_sample_reproducible_across_threads(tmp_path, monkeypatch):
    args = ["sample", "--dist", "triesz-I", "--n", "25000", "--seed", "11", "--stream", "2"]
    monkeypatch.setenv("RIESZ_LAB_THREADS", "1")
    a = run(tmp_path, *args)[1]
    monkeypatch.setenv("RIESZ_LAB_THREADS", "4")
    b = run(tmp_path, *args)[1]
    assert a == b
    c = run(tmp_path, *args[:-1], "3")[1]
    assert c != a


def test_eval_matches_library(tmp_path):
    params = write(tmp_path, "p.json", {"a": 3, "kappa": [1, 0]})
    point = write(tmp_path, "x.json", [[[2.0, 0.3], [0.3, 1.0]], [[1.0, 0.0], [0.0, 1.0]]])
    code, text = run(tmp_path, "eval", "--dist", "riesz-I", "--params", params, "--point", point)
    assert code == 0
    got = [json.loads(r)["logpdf"] for r in text.splitlines()]
    p = RieszParams(3, [1, 0])
    assert got[0] == dens.riesz_logpdf(np.array([[2.0, 0.3], [0.3, 1.0]]), p)
    assert got[1] == dens.riesz_logpdf(np.eye(2), p)


def test_eval_outside_support_prints_token(tmp_path):
    point = write(tmp_path, "x.json", [[1.0, 0.0], [0.0, -1.0]])
    code, text = run(tmp_path, "eval", "--dist", "riesz", "--point", point)
    assert code == 0 and json.loads(text)["logpdf"] == "-inf"


def test_eval_quaternion_literal(tmp_path):
    params = write(tmp_path, "p.json", {"n": 2, "kappa": [0.5], "beta": 4})
    point = write(tmp_path, "x.json", {"re": [[0.3], [0.1]], "j": [[0.2], [-0.4]]})
    code, text = run(tmp_path, "eval", "--dist", "kotzriesz", "--params", params,
                     "--point", point)
    assert code == 0 and np.isfinite(json.loads(text)["logpdf"])


@pytest.mark.parametrize("argv", [
    ["sample", "--dist", "nope", "--n", "2"],
    ["sample", "--dist", "riesz-I", "--variant", "II", "--n", "2"],
    ["sample", "--dist", "riesz", "--n", "0"],
    ["check", "--suite", "huge"],
])
def test_usage_errors_exit_2(argv, capsys):
    assert cli.run(argv) == 2
    assert "error:" in capsys.readouterr().err


def test_unknown_and_invalid_params_exit_2(tmp_path, capsys):
    bad = write(tmp_path, "bad.json", {"a": 3, "kappa": [1, 0], "colour": "red"})
    assert cli.run(["sample", "--dist", "riesz", "--params", bad, "--n", "1"]) == 2
    assert "colour" in capsys.readouterr().err
    dom = write(tmp_path, "dom.json", {"a": 0.2, "kappa": [0, 0]})
    assert cli.run(["sample", "--dist", "riesz", "--params", dom, "--n", "1"]) == 2
    assert "requires" in capsys.readouterr().err


def test_table_lgamma(tmp_path):
    params = write(tmp_path, "p.json", {"m": 2, "beta": 1})
    code, text = run(tmp_path, "table", "--function", "lgamma_m", "--params", params,
                     "--grid", "2:4:3")
    assert code == 0
    rows = [r.split(",") for r in text.splitlines()[2:]]
    from scipy.special import multigammaln
    assert [float(v) for _, v in rows] == pytest.approx([multigammaln(a, 2) for a in (2, 3, 4)])


def test_table_jack(tmp_path):
    params = write(tmp_path, "p.json", {"tau": [1], "beta": 2})
    code, text = run(tmp_path, "table", "--function", "jack_C", "--params", params,
                     "--grid", "[[1, 2], [3, 4]]")
    assert code == 0
    assert [float(r.split(",")[-1]) for r in text.splitlines()[2:]] == [3.0, 7.0]


def test_sv_density_command(tmp_path):
    code, text = run(tmp_path, "sv-density", "--dist", "eig", "--grid", "[[2.0, 1.0]]")
    assert code == 0
    assert text.splitlines()[1] == "gamma_1,gamma_2,logpdf"


def test_quick_check_suite(tmp_path):
    code, text = run(tmp_path, "check", "--suite", "quick", "--seed", "1")
    assert code == 0
    reports = json.loads(text)
    assert reports and all(r["passed"] for r in reports)


def test_console_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "riesz_lab.cli", "sample", "--dist", "riesz",
                          "--n", "2", "--seed", "5"], capture_output=True, text=True, check=True)
    assert out.stdout.splitlines()[1] == "v_1_1_re,v_1_2_re,v_2_1_re,v_2_2_re"
