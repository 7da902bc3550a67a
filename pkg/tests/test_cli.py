import json
import math
import re
import subprocess
import sys

import numpy as np
import pytest

from expospec.cli import EXIT_NEWTON, EXIT_NONFINITE, EXIT_UNDERFLOW, EXIT_USAGE, dumps, main

NUMBER = re.compile(r"-?\d[\d.e+-]*")


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def run_usage(argv, capsys):
    # argparse-level errors exit through SystemExit
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


def parse_csv(text):
    lines = text.strip().splitlines()
    return lines[0].split(","), np.array([[float(v) for v in line.split(",")] for line in lines[1:]])


# serialization


def test_dumps_canonical():
    doc = {"b": [1.0, 0.1, -math.inf], "a": {"z": True, "y": None}, "c": np.array([2.5]), "n": 3}
    assert dumps(doc) == '{"a":{"y":null,"z":true},"b":[1,0.10000000000000001,"-inf"],"c":[2.5],"n":3}'
    assert json.loads(dumps(doc))["b"][1] == 0.1


# tableau


def test_tableau_explicit_n1(capsys):
    code, out, _ = run(["tableau", "--scheme", "explicit", "--n", "1"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"scheme", "n", "nu", "mu", "sigma", "dense"}
    assert doc["mu"] == [[1]]
    a, b = 1 / math.log(2) - 1, 2 - 1 / math.log(2)
    assert doc["sigma"][0] == pytest.approx(a, rel=1e-15)
    assert doc["sigma"][1] == pytest.approx(b, rel=1e-15)
    # 17 significant digits: every printed value round-trips exactly
    assert "0.4426950408889634" in out and "0.5573049591110365" in out
    for tok in NUMBER.findall(out):
        assert len(re.sub(r"e.*|[-.]", "", tok).lstrip("0")) <= 17


def test_tableau_is_deterministic(capsys):
    first = run(["tableau", "--scheme", "explicit", "--n", "6"], capsys)[1]
    second = run(["tableau", "--scheme", "explicit", "--n", "6"], capsys)[1]
    assert first == second


@pytest.mark.parametrize("scheme", ["astable2", "lstable2"])
def test_tableau_second_degree_rules(scheme, capsys):
    code, out, _ = run(["tableau", "--scheme", scheme], capsys)
    doc = json.loads(out)
    assert code == 0 and set(doc) == {"scheme", "stages", "c", "A", "b"}
    assert len(doc["A"]) == doc["stages"] ** 2
    if scheme == "lstable2":
        assert doc["c"][0] == pytest.approx(0.15273, abs=1e-5) and doc["c"][1] == 1


def test_tableau_implicit_fields(capsys):
    doc = json.loads(run(["tableau", "--scheme", "implicit", "--n", "3"], capsys)[1])
    assert set(doc) == {"scheme", "n", "nu", "sigma0", "sigma"}
    assert len(doc["sigma"]) == 9


@pytest.mark.parametrize(
    "argv",
    [
        ["tableau", "--scheme", "explicit", "--n", "0"],
        ["tableau", "--scheme", "explicit"],
        ["tableau", "--scheme", "astable2", "--n", "2"],
        ["tableau", "--scheme", "bogus"],
        ["tableau", "--scheme", "explicit", "--n", "x"],
        ["nonsense"],
        [],
    ],
)
def test_usage_errors(argv, capsys):
    code, _, err = run_usage(argv, capsys)
    assert code == EXIT_USAGE
    assert "error" in err


def test_tableau_to_file(tmp_path, capsys):
    path = tmp_path / "t.json"
    assert run(["tableau", "--scheme", "lstable2", "-o", str(path)], capsys)[1] == ""
    assert json.loads(path.read_text())["stages"] == 2


# solve


def test_solve_decay(capsys):
    code, out, err = run(["solve", "--problem", "decay", "--scheme", "explicit", "--n", "4", "--h", "0.01"], capsys)
    assert code == 0
    header, rows = parse_csv(out)
    assert header == ["T", "Y0"]
    assert rows[0].tolist() == [0.0, 1.0] and rows[-1, 0] == 1.0 and len(rows) == 101
    assert abs(rows[-1, 1] - 0.36787944) == pytest.approx(5.922e-5, rel=1e-3)
    assert "accepted=100" in err and "rhs_evals=500" in err


def test_solve_prothero_lstable2(capsys):
    code, out, _ = run(["solve", "--problem", "prothero", "--scheme", "lstable2", "--h", "0.1"], capsys)
    _, rows = parse_csv(out)
    assert code == 0 and np.all(np.isfinite(rows))
    assert np.max(np.abs(rows[:, 1] - np.cos(rows[:, 0]))) <= 1e-4


def test_solve_monotonicity_regimes(capsys):
    def ratio(h):
        argv = ["solve", "--problem", "decay", "--scheme", "explicit", "--n", "1", "--h", h, "--t-final", h]
        _, rows = parse_csv(run(argv, capsys)[1])
        return rows[1, 1] / rows[0, 1]

    assert 0 < ratio("1.5") < 1
    assert ratio("3.0") > 1


def test_solve_adaptive_multidimensional(capsys):
    argv = ["solve", "--problem", "lorenz", "--scheme", "explicit", "--n", "3", "--adaptive", "--rtol", "1e-4", "--t-final", "0.5"]
    code, out, err = run(argv, capsys)
    header, rows = parse_csv(out)
    assert code == 0 and header == ["T", "Y0", "Y1", "Y2"] and rows[-1, 0] == 0.5
    assert np.all(np.diff(rows[:, 0]) > 0) and "rejected=" in err


def test_solve_mode_exclusive(capsys):
    argv = ["solve", "--problem", "decay", "--scheme", "explicit", "--n", "2", "--h", "0.1", "--adaptive"]
    assert run_usage(argv, capsys)[0] == EXIT_USAGE
    assert run_usage(["solve", "--problem", "decay", "--scheme", "explicit", "--n", "2"], capsys)[0] == EXIT_USAGE
    assert run_usage(["solve", "--problem", "nope", "--scheme", "explicit", "--n", "2", "--h", "0.1"], capsys)[0] == EXIT_USAGE


def test_solve_exit_statuses(capsys):
    base = ["solve", "--problem", "riccati"]
    assert run(base + ["--scheme", "explicit", "--n", "2", "--h", "0.1"], capsys)[0] == EXIT_NONFINITE
    assert run(base + ["--scheme", "lstable2", "--h", "0.5"], capsys)[0] == EXIT_NEWTON
    assert run(base + ["--scheme", "explicit", "--n", "2", "--adaptive", "--h-min", "1e-6"], capsys)[0] == EXIT_UNDERFLOW
    assert len({EXIT_NONFINITE, EXIT_NEWTON, EXIT_UNDERFLOW, EXIT_USAGE}) == 4


def test_solve_parameters(capsys):
    argv = ["solve", "--problem", "decay_gamma", "--param", "gamma=2", "--scheme", "implicit", "--n", "1", "--h", "0.5"]
    _, rows = parse_csv(run(argv, capsys)[1])
    A = 1 / math.log(2) - 1
    assert rows[1, 1] == pytest.approx((1 - A) / (1 + (1 - A)), rel=1e-12)
    assert run(["solve", "--problem", "decay", "--param", "oops", "--scheme", "implicit", "--n", "1", "--h", "0.5"], capsys)[0] == EXIT_USAGE


# convergence


def convergence(argv, capsys):
    code, out, _ = run(["convergence"] + argv, capsys)
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "h,error,order"
    return [line.split(",") for line in lines[1:]]


def test_convergence_decay_n1(capsys):
    rows = convergence(["--problem", "decay", "--scheme", "explicit", "--n", "1"], capsys)
    assert len(rows) >= 5 and rows[0][2] == ""
    assert abs(float(rows[-1][2]) - 1.0) <= 0.1
    # error/(h e^-1) tends to the local error constant; one Richardson step removes the O(h) drift
    h = np.array([float(r[0]) for r in rows])
    c = np.array([float(r[1]) for r in rows]) / (h * math.exp(-1))
    assert abs(2 * c[-1] - c[-2] - 0.0573) <= 5e-4


def test_convergence_zero_problem(capsys):
    rows = convergence(["--problem", "zero", "--scheme", "explicit", "--n", "1"], capsys)
    assert all(float(r[1]) == 0.0 for r in rows)
    assert all(r[2] == "exact" for r in rows[1:])


def test_convergence_errors(capsys):
    assert run(["convergence", "--problem", "lorenz", "--scheme", "explicit", "--n", "1"], capsys)[0] == EXIT_USAGE
    assert run_usage(["convergence", "--problem", "decay", "--scheme", "explicit", "--n", "1", "--levels", "4"], capsys)[0] == EXIT_USAGE


# stability


def test_stability_implicit_n1(tmp_path, capsys):
    pbm = tmp_path / "r.pbm"
    argv = ["stability", "--scheme", "implicit", "--n", "1", "--re", "-20", "2", "--im", "-5", "5", "--resolution", "111", "--pbm", str(pbm)]
    code, out, _ = run(argv, capsys)
    doc = json.loads(out)
    assert code == 0 and doc["a_stable"] is True and doc["l_stable"] is False
    assert doc["limit_minus_infinity"] == pytest.approx(-0.794349, abs=1e-6)
    assert doc["real_interval"] == ["-inf", 0]
    lines = pbm.read_text().splitlines()
    assert lines[:2] == ["P1", "111 111"]
    grid = np.array([[int(v) for v in line.split()] for line in lines[2:]])
    re = np.linspace(-20, 2, 111)
    assert grid[:, re <= 0].all()


def test_stability_explicit_n1(capsys):
    doc = json.loads(run(["stability", "--scheme", "explicit", "--n", "1", "--resolution", "21"], capsys)[1])
    assert doc["real_interval"][0] == pytest.approx(-1.79436, abs=1e-3)
    np.testing.assert_allclose(doc["P"], [1, 1, 0.557305], atol=1e-6)
    assert doc["Q"] == [1] and doc["limit_minus_infinity"] == "inf"


def test_stability_lstable2(capsys):
    doc = json.loads(run(["stability", "--scheme", "lstable2", "--resolution", "21"], capsys)[1])
    assert doc["limit_minus_infinity"] == 0 and doc["l_stable"] is True


def test_stability_resolution_limit(capsys):
    assert run(["stability", "--scheme", "lstable2", "--resolution", "5000"], capsys)[0] == EXIT_USAGE


# orthocheck


def test_orthocheck(capsys):
    doc = json.loads(run(["orthocheck", "--n", "16"], capsys)[1])
    assert doc["16"]["orthogonality"] <= 1e-8 and doc["16"]["integral"] <= 1e-8
    doc = json.loads(run(["orthocheck", "--n", "4", "--all"], capsys)[1])
    assert sorted(doc) == ["1", "2", "3", "4"]
    assert run(["orthocheck", "--n", "40"], capsys)[0] == EXIT_USAGE


# entry points


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "expospec", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    for sub in ("tableau", "solve", "convergence", "stability", "orthocheck"):
        assert sub in res.stdout


def test_subprocess_bytes_identical():
    argv = [sys.executable, "-m", "expospec", "stability", "--scheme", "explicit", "--n", "2", "--resolution", "31"]
    a = subprocess.run(argv, capture_output=True).stdout
    b = subprocess.run(argv, capture_output=True).stdout
    assert a == b and a.endswith(b"\n")
