import csv
import io
import math
import subprocess
import sys

import pytest

from trunc_range.cli import run


def out_of(capsys, argv):
    code = run(argv)
    return code, capsys.readouterr()


def test_variance_two_routes(capsys):
    code, cap = out_of(capsys, ["variance", "--family", "cauchy", "--ell", "1", "--symmetric"])
    assert code == 0
    lines = dict(line.split("=") for line in cap.out.splitlines())
    assert set(lines) == {"moment_route", "ell2h_route"}
    for v in lines.values():
        assert float(v) == pytest.approx(4 / math.pi - 1, abs=1e-12)
        assert v.startswith("0.2732395")


def test_variance_general_support(capsys):
    code, cap = out_of(capsys, ["variance", "--family", "normal", "--a", "0", "--b", "2"])
    assert code == 0
    assert cap.out.startswith("moment_route=") and "ell2h_route" not in cap.out


def test_moment(capsys):
    code, cap = out_of(capsys, ["moment", "--family", "normal", "--ell", "1", "--symmetric",
                                "--c", "0", "--p", "2"])
    assert code == 0 and float(cap.out) == pytest.approx(0.2911250948, abs=1e-10)


def test_hcurve(capsys):
    code, cap = out_of(capsys, ["hcurve", "--family", "normal", "--ell-min", "0.001",
                                "--ell-max", "100", "--points", "200"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(cap.out)))
    assert len(rows) == 200
    assert float(rows[0]["h"]) == pytest.approx(1 / 3, abs=1e-3)
    assert float(rows[0]["ratio"]) == pytest.approx(math.sqrt(float(rows[0]["h"])), rel=1e-14)
    assert float(rows[-1]["ell"]) == pytest.approx(100.0)


def test_hcurve_jobs_identical(capsys):
    argv = ["hcurve", "--family", "logistic", "--points", "20"]
    _, a = out_of(capsys, argv)
    _, b = out_of(capsys, argv + ["--jobs", "2"])
    assert a.out == b.out


def test_bounds_check(capsys):
    code, cap = out_of(capsys, ["bounds-check", "--seed", "3", "--instances", "40"])
    assert code == 0
    body = cap.out.splitlines()[1:]
    assert len(body) == 6 and all(line.endswith("PASS") for line in body)


def test_limits(capsys, tmp_path):
    out = tmp_path / "lim.csv"
    code, _ = out_of(capsys, ["limits", "--family", "cauchy", "--mode", "sigma2-over-ell",
                              "--tolerance", "1e-3", "--output", str(out)])
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert [float(r["ell"]) for r in rows] == [10.0, 100.0, 1000.0, 10000.0]
    code, _ = out_of(capsys, ["limits", "--family", "cauchy", "--mode", "small-h",
                              "--tolerance", "1e-9"])
    assert code == 2


def test_pipeline_and_fit(capsys, tmp_path):
    series, curve = tmp_path / "s.csv", tmp_path / "c.csv"
    assert run(["synth", "--family", "normal", "--ell", "1", "--days", "5", "--per-day", "400",
                "--seed", "2", "--output", str(series)]) == 0
    daily = tmp_path / "d.csv"
    assert run(["curve", "--input", str(series), "--grid", "200", "--output", str(curve),
                "--daily", str(daily)]) == 0
    assert len(daily.read_text().splitlines()) == 6
    capsys.readouterr()
    fig = tmp_path / "fig.csv"
    code, cap = out_of(capsys, ["fit", "--input", str(curve), "--ell-max", "0.5",
                                "--figure-data", str(fig)])
    assert code == 0
    report = dict(line.split("=") for line in cap.out.splitlines())
    assert {"beta", "zeta", "slope", "intercept", "r_squared", "ell_min", "ell_max",
            "points_used"} <= set(report)
    assert float(report["ell_max"]) <= 0.5
    assert fig.read_text().startswith("ln_ell,ln_ratio,ln_ratio_fit,in_fit_range")


def test_curve_prices_schema(capsys, tmp_path):
    src = tmp_path / "p.csv"
    src.write_text("timestamp,price\n2024-01-02T09:00:00,100\n2024-01-02T09:01:00,101\n"
                   "2024-01-02T09:02:00,99\n2024-01-02T09:03:00,100\n")
    code, cap = out_of(capsys, ["curve", "--input", str(src), "--schema", "prices", "--grid", "4"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(cap.out)))
    assert len(rows) == 4 and int(rows[-1]["n_kept"]) == 3


def test_reparsed_outputs_reproduce(capsys, tmp_path):
    series = tmp_path / "s.csv"
    run(["synth", "--family", "laplace", "--ell", "3", "--days", "4", "--per-day", "250",
         "--seed", "6", "--output", str(series)])
    c1, c2 = tmp_path / "c1.csv", tmp_path / "c2.csv"
    run(["curve", "--input", str(series), "--output", str(c1)])
    run(["curve", "--input", str(series), "--output", str(c2)])
    assert c1.read_bytes() == c2.read_bytes()
    capsys.readouterr()
    _, a = out_of(capsys, ["fit", "--input", str(c1)])
    _, b = out_of(capsys, ["fit", "--input", str(c2)])
    assert a.out == b.out


@pytest.mark.parametrize("argv", [
    ["frobnicate"],
    ["variance", "--family", "cauchy", "--ell", "1", "--bogus"],
    ["synth", "--family", "normal", "--ell", "1"],
    ["bounds-check"],
    ["variance", "--family", "gumbel", "--ell", "1"],
    [],
])
def test_usage_errors_exit_1(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        run(argv)
    assert exc.value.code == 1
    assert "usage" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["variance", "--family", "normal", "--a", "1"],
    ["variance", "--family", "normal", "--ell", "-1", "--symmetric"],
    ["moment", "--family", "normal", "--ell", "1", "--c", "5", "--p", "2"],
    ["curve", "--input", "/nonexistent/file.csv"],
    ["hcurve", "--family", "normal", "--ell-min", "2", "--ell-max", "1"],
])
def test_validation_errors_exit_1(capsys, argv):
    code, cap = out_of(capsys, argv)
    assert code == 1 and cap.err


def test_degenerate_fit_exit_2(capsys, tmp_path):
    path = tmp_path / "c.csv"
    rows = ["ell,n_kept,sigma,ratio"] + [f"{e},10,{e**-0.5},{e**-1.5}" for e in (0.1, 0.2, 0.4, 0.8)]
    path.write_text("\n".join(rows) + "\n")
    code, cap = out_of(capsys, ["fit", "--input", str(path), "--ell-min", "0.1", "--ell-max", "1"])
    assert code == 2 and "degenerate=true" in cap.out


def test_console_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "trunc_range.cli", "variance", "--family",
                          "laplace", "--ell", "2", "--symmetric"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    a, b = (float(line.split("=")[1]) for line in res.stdout.splitlines())
    assert a == pytest.approx(b, rel=1e-9)
