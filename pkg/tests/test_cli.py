import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from involutions.cli import run


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], np.array(rows[1:], dtype=float)


def test_construct_csv_closed_form(capsys):
    code, out, _ = call(capsys, "construct", "--even", "y^2/8", "--emit", "csv")
    assert code == 0
    header, rows = read_csv(out)
    assert header == ["x", "h"]
    x, h = rows[:, 0], rows[:, 1]
    assert x.min() > -1 and x.max() < 3
    assert np.max(np.abs(h - (x + 4 - 4 * np.sqrt(1 + x)))) <= 1e-8
    assert "\r" not in out


def test_construct_json(capsys):
    code, out, _ = call(capsys, "construct", "--even", "y6", "--emit", "json")
    d = json.loads(out)
    s = 6 ** 0.2
    assert code == 0
    assert d["J"][0] == pytest.approx(-5 / (12 * s), abs=1e-10)
    assert d["J"][1] == pytest.approx(7 / (12 * s), abs=1e-10)


def test_full_precision_digits(capsys):
    _, out, _ = call(capsys, "construct", "--even", "y^2/8", "--n", "5")
    # -0.96837722339831622 and friends: 17 significant digits survive
    x = out.splitlines()[2].split(",")[0]
    assert len(x.lstrip("-").replace(".", "").lstrip("0")) == 17
    _, rows = read_csv(out)
    assert float(x) == rows[1, 0]


def test_verify_negation(capsys):
    code, out, _ = call(capsys, "verify", "--catalog", "negation")
    d = json.loads(out)
    assert code == 0 and d["report"]["max_involution_residual"] == 0.0


def test_verify_even(capsys):
    code, out, _ = call(capsys, "verify", "--even", "abs_lambda", "--lam", "3")
    assert code == 0 and json.loads(out)["report"]["passed"]


@pytest.mark.parametrize("argv", [
    ["verify", "--catalog", "piecewise_linear", "--params", "-2"],
    ["verify", "--catalog", "piecewise_linear", "--params", "0"],
    ["construct", "--even", "nonsense"],
    ["construct", "--even", "abs_lambda", "--lam", "-1"],
    ["frobnicate"],
    ["period", "--preset", "harmonic", "--bogus"],
    ["fde", "--a", "1", "--t-lo", "-1.5"],
    ["fde", "--a", "1", "--t-lo", "-0.9999999999"],
    ["figures", "--which", "6"],
    ["construct", "--even", "zero", "--n", "1"],
    [],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = call(capsys, *argv)
    assert code == 2
    assert "error" in err


def test_unwritable_output(capsys, tmp_path):
    target = tmp_path / "missing" / "out.csv"
    code, _, err = call(capsys, "construct", "--even", "zero", "-o", str(target))
    assert code == 2 and "cannot write" in err


def test_output_file(capsys, tmp_path):
    target = tmp_path / "h.csv"
    code, out, _ = call(capsys, "construct", "--even", "y^2/8", "-o", str(target))
    assert code == 0 and out == ""
    assert target.read_bytes().startswith(b"x,h\n")


def test_period_check_pass_and_fail(capsys):
    code, out, _ = call(capsys, "period", "--catalog", "rational", "--params", "1",
                        "--emit", "json", "--check")
    assert code == 0 and json.loads(out)["passed"]
    code, out, _ = call(capsys, "period", "--preset", "stiff", "--emit", "json", "--check")
    assert code == 1 and not json.loads(out)["passed"]
    code, _, _ = call(capsys, "period", "--preset", "stiff")
    assert code == 0  # a report was produced; failure only matters with --check


def test_period_csv(capsys):
    code, out, _ = call(capsys, "period", "--preset", "harmonic", "--energies", "0.1", "1",
                        "10")
    header, rows = read_csv(out)
    assert code == 0 and header[:2] == ["E", "T_quadrature"]
    assert np.allclose(rows[:, 1], 2 * math.pi, atol=1e-9)


def test_potential_table(capsys):
    code, out, _ = call(capsys, "potential", "--catalog", "negation", "--n", "11")
    header, rows = read_csv(out)
    assert code == 0 and header[:2] == ["x", "V"]
    assert np.allclose(rows[:, 1], rows[:, 0] ** 2 / 2)


def test_stability_verdicts(capsys):
    code, out, _ = call(capsys, "stability", "--force", "constant", "--c", "3",
                        "--expect", "stable")
    assert code == 0 and json.loads(out)["verdict"] == "stable"
    code, out, _ = call(capsys, "stability", "--force", "quadratic", "--expect", "stable")
    assert code == 1 and json.loads(out)["verdict"] == "unstable"
    code, _, _ = call(capsys, "stability", "--force", "quadratic", "--expect", "unstable")
    assert code == 0


def test_simulate_csv(capsys):
    code, out, _ = call(capsys, "simulate", "--force", "quadratic", "--t-end", "2",
                        "--dt", "0.5")
    header, rows = read_csv(out)
    assert code == 0 and header == ["t", "x", "vx", "y", "vy", "E_x", "L"]
    assert rows[:, 0].tolist() == [0.0, 0.5, 1.0, 1.5, 2.0]
    assert np.allclose(rows[:, 6], 0.2, atol=1e-10)


def test_fde_outputs(capsys):
    code, out, _ = call(capsys, "fde", "--a", "0.5", "--n", "101")
    header, rows = read_csv(out)
    assert code == 0 and header == ["t", "y_numeric", "y_closed_form", "residual"]
    assert np.max(np.abs(rows[:, 1] - rows[:, 2])) <= 1e-8
    code, out, _ = call(capsys, "fde", "--a", "2", "--t-lo", "-0.9", "--emit", "json")
    d = json.loads(out)
    assert d["regime"] == "oscillatory" and d["residual"] <= 1e-6 and d["max_error"] <= 1e-7


def test_catalog_listing(capsys):
    code, out, _ = call(capsys, "catalog")
    names = json.loads(out)
    assert code == 0 and "negation" in json.dumps(names)


def test_figure5_files(capsys, tmp_path):
    code, out, _ = call(capsys, "figures", "--which", "5", "--outdir", str(tmp_path))
    assert code == 0
    names = sorted(p.name for p in tmp_path.glob("figure5_*.csv"))
    assert names == ["figure5_t0-14.csv", "figure5_t0-38.csv", "figure5_t0-8.csv"]
    for name, end in (("figure5_t0-8.csv", 8.0), ("figure5_t0-38.csv", 38.0)):
        header, rows = read_csv((tmp_path / name).read_text())
        assert header == ["t", "x", "y"] and rows[0].tolist() == [0.0, 0.4, 0.0]
        assert rows[-1, 0] == end
    meta = json.loads((tmp_path / "figure5.json").read_text())
    assert meta["windows"] == [[0.0, 8.0], [0.0, 14.0], [0.0, 38.0]]


def test_figures_1_to_4(capsys, tmp_path):
    code, _, _ = call(capsys, "figures", "--which", "1", "2", "3", "4", "--n", "101",
                      "--outdir", str(tmp_path))
    assert code == 0
    rows = list(csv.reader(io.StringIO((tmp_path / "figure1.csv").read_text())))
    assert rows[0] == ["series", "x", "y"]
    h = np.array([[float(v) for v in r[1:]] for r in rows[1:] if r[0] == "h"])
    assert np.all((h[:, 0] > -1) & (h[:, 0] < 3))
    meta2 = json.loads((tmp_path / "figure2.json").read_text())
    assert meta2["J"][0] == pytest.approx(-5 / (12 * 6 ** 0.2), abs=1e-10)
    meta4 = json.loads((tmp_path / "figure4.json").read_text())
    assert meta4["line_L"] == "x+y+2=0"
    series4 = {r.split(",")[0] for r in (tmp_path / "figure4.csv").read_text().splitlines()[1:]}
    assert series4 == {"h", "cubic_curve", "line_L", "diagonal"}


def test_deterministic_output(capsys, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert run(["figures", "--which", "2", "5", "--n", "101", "--outdir", str(d)]) == 0
    capsys.readouterr()
    for f in a.iterdir():
        assert f.read_bytes() == (b / f.name).read_bytes()
    _, one, _ = call(capsys, "construct", "--even", "log_cosh")
    _, two, _ = call(capsys, "construct", "--even", "log_cosh")
    assert one == two


def test_parallel_figures_match_serial(capsys, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(["figures", "--which", "1", "3", "--n", "51", "--outdir", str(a)]) == 0
    assert run(["figures", "--which", "1", "3", "--n", "51", "--outdir", str(b),
                "--parallel"]) == 0
    capsys.readouterr()
    for f in a.iterdir():
        assert f.read_bytes() == (b / f.name).read_bytes()


def test_environment_overrides(capsys, monkeypatch):
    monkeypatch.setenv("INVOLUTIONS_SAMPLES", "7")
    code, out, _ = call(capsys, "verify", "--catalog", "negation")
    assert code == 0 and json.loads(out)["report"]["samples_used"] == 7
    monkeypatch.setenv("INVOLUTIONS_TOL", "not-a-number")
    code, _, err = call(capsys, "verify", "--catalog", "negation")
    assert code == 2 and "INVOLUTIONS_TOL" in err
    monkeypatch.setenv("INVOLUTIONS_TOL", "-1")
    assert call(capsys, "verify", "--catalog", "negation")[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "involutions", "verify", "--catalog",
                           "negation"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and '"passed": true' in proc.stdout


def test_closed_pipe_is_quiet():
    proc = subprocess.Popen([sys.executable, "-m", "involutions", "fde", "--a", "0.3",
                             "--n", "20000"], stdout=subprocess.PIPE, stderr=subprocess.PIPE)
    proc.stdout.readline()
    proc.stdout.close()
    err = proc.stderr.read()
    proc.wait(timeout=60)
    assert b"Traceback" not in err
