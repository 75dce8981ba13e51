import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from thetazeta.checks import format_report, run_checks
from thetazeta.cli import (
    OutputRecord,
    figure_csv,
    figure_grid,
    fmt,
    main,
    parse_complex,
    parse_real,
    read_records,
    write_records,
)


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_zeta_pi_over_six(capsys):
    code, out, _ = run(["eval", "zeta", "--s", "2", "--alpha", "0.5"], capsys)
    rec = read_records(out, "csv")[0]
    assert code == 0 and abs(rec.value_re - math.pi / 6) < 1e-12 and rec.error == ""


def test_eval_eisenstein_same_value(capsys):
    code, out, _ = run(["eval", "eisenstein", "--y", "1", "--s", "2", "--alpha", "1/2", "--format", "json"], capsys)
    rec = read_records(out, "json")[0]
    assert code == 0 and abs(rec.value_re - math.pi / 6) < 1e-12 and rec.y == 1.0


def test_eval_pole_guard(capsys):
    code, out, err = run(["eval", "zeta", "--s", "1"], capsys)
    assert code == 2
    assert read_records(out, "csv")[0].error == "pole_guard"
    assert json.loads(err.splitlines()[-1])["error"] == "pole_guard"


def test_eval_multiple_points_and_characters(capsys):
    code, out, _ = run(["eval", "dirichlet", "--character", "-4", "--s", "1", "--s", "0.5+3i"], capsys)
    recs = read_records(out, "csv")
    assert code == 0 and len(recs) == 2 and abs(recs[0].value_re - 1) < 1e-12
    assert recs[1].s_im == 3.0 and recs[0].param == "chi-4"


def test_eval_character_file(tmp_path, capsys):
    p = tmp_path / "chi.json"
    p.write_text(json.dumps({"q": 3, "values": [0, 1, -1]}))
    code, out, _ = run(["eval", "dirichlet", "--character", str(p), "--s", "2"], capsys)
    assert code == 0 and read_records(out, "csv")[0].value_re > 0


def test_eval_cuspform(capsys):
    code, out, _ = run(["eval", "cuspform", "--s", "6", "--alpha", "2/5"], capsys)
    assert code == 0 and abs(read_records(out, "csv")[0].value_re - 0.0015448793603950273) < 1e-12


def test_eval_missing_parameters(capsys):
    assert run(["eval", "eisenstein", "--s", "2"], capsys)[0] == 2
    assert run(["eval", "dirichlet", "--s", "2"], capsys)[0] == 2


def test_non_convergence_exit_three(capsys):
    code, out, _ = run(["eval", "dirichlet", "--character", "5", "--s", "2"], capsys)
    assert code == 3 and read_records(out, "csv")[0].error == "non_convergence"


def test_bad_arguments_exit_two(capsys):
    assert run(["eval", "zeta", "--s", "abc"], capsys)[0] == 2
    assert run(["figure", "3"], capsys)[0] == 2


def test_config_file(tmp_path, capsys):
    p = tmp_path / "prec.json"
    p.write_text(json.dumps({"series_tol": 1e-9}))
    from thetazeta.config import Precision, get_precision, set_precision

    old = get_precision()
    try:
        code, out, _ = run(["--config", str(p), "eval", "zeta", "--s", "2"], capsys)
        assert code == 0 and get_precision().series_tol == 1e-9
    finally:
        set_precision(old)
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"nope": 1}))
    assert run(["--config", str(bad), "eval", "zeta", "--s", "2"], capsys)[0] == 2


def test_dump_coeffs_theta_half(capsys):
    code, out, _ = run(["dump-coeffs", "theta", "--alpha", "1/2", "--n", "4"], capsys)
    assert code == 0
    assert out == "index,value\n1,1\n2,-0.5\n3,0.5\n4,0.375\n"


def test_dump_coeffs_theta_one(capsys, tmp_path):
    p = tmp_path / "c.csv"
    assert run(["dump-coeffs", "theta", "--alpha", "1", "--n", "9", "--out", str(p)], capsys)[0] == 0
    rows = list(csv.DictReader(p.open()))
    nonzero = {int(r["index"]): float(r["value"]) for r in rows if float(r["value"])}
    assert len(rows) == 9 and nonzero == {1: 2.0, 4: 2.0, 9: 2.0}


def test_dump_coeffs_gate_failure(capsys):
    code, _, err = run(["dump-coeffs", "chi", "--character", "-19", "--n", "4"], capsys)
    assert code == 2 and json.loads(err)["error"] == "gate"


def test_dump_coeffs_cusp(capsys):
    code, out, _ = run(["dump-coeffs", "cuspform", "--alpha", "0.5", "--n", "1"], capsys)
    assert code == 0 and out.splitlines()[1] == "1,-12"


def test_figure_grid():
    g = figure_grid(0.05, 40, 0.05)
    assert len(g) == 800 and g[0] == 0.05 and g[-1] == 40.0 and g[2] == 0.15
    with pytest.raises(Exception):
        figure_grid(0.0, 40, 0.05)


def test_figure_t_min_zero_exit_two(capsys):
    assert run(["figure", "1", "--t-min", "0"], capsys)[0] == 2


def test_figure_small_run_and_svg(tmp_path, capsys):
    out_csv, out_svg = tmp_path / "f.csv", tmp_path / "f.svg"
    code = run(["figure", "2", "--t-min", "13.5", "--t-max", "14.5", "--step", "0.25",
                "--out", str(out_csv), "--svg", str(out_svg)], capsys)[0]
    assert code == 0
    rows = list(csv.DictReader(out_csv.open()))
    assert list(rows[0]) == ["t", "abs_zeta_oracle", "abs_approx", "abs_diff"]
    assert [float(r["t"]) for r in rows] == [13.5, 13.75, 14.0, 14.25, 14.5]
    for r in rows:
        assert float(r["abs_diff"]) == abs(float(r["abs_approx"]) - float(r["abs_zeta_oracle"]))
    assert out_svg.read_text().count("<polyline") == 2


def test_figure_deterministic_across_threads(monkeypatch):
    a = figure_csv(1, 1.0, 4.0, 0.5, threads=1)
    b = figure_csv(1, 1.0, 4.0, 0.5, threads=6)
    assert a == b


def test_figure_auto_budget(capsys):
    code, out, _ = run(["figure", "1", "--t-min", "20", "--t-max", "21", "--step", "0.5", "--n-max", "auto"], capsys)
    diffs = [float(line.split(",")[3]) for line in out.splitlines()[1:]]
    assert code == 0 and len(diffs) == 3 and max(diffs) < 1e-8


def test_thread_env(monkeypatch):
    from thetazeta.cli import thread_count

    monkeypatch.setenv("THETAZETA_THREADS", "3")
    assert thread_count() == 3


def test_fmt_seventeen_digits():
    assert fmt(0.1) == "0.10000000000000001"
    assert float(fmt(math.pi)) == math.pi


@given(st.integers(-50, 50), st.integers(1, 60))
def test_parse_fraction(p, q):
    assert parse_real(f"{p}/{q}") == p / q


def test_parse_complex_forms():
    assert parse_complex("1/2") == 0.5
    assert parse_complex("0.5+14.13i") == complex(0.5, 14.13)
    assert parse_complex("-2j") == -2j


def test_record_round_trip_100():
    rng = np.random.default_rng(7)
    recs = [OutputRecord.random(rng) for _ in range(100)]
    for name in ("csv", "json"):
        buf = io.StringIO()
        write_records(recs, name, buf)
        assert read_records(buf.getvalue(), name) == recs


@given(st.floats(allow_nan=False, allow_infinity=False), st.one_of(st.none(), st.floats(allow_nan=False, allow_infinity=False)),
       st.text(max_size=20))
def test_record_round_trip_property(x, y, msg):
    r = OutputRecord("zeta", x, -x, 0.5, value_re=y, message=msg)
    assert OutputRecord.from_csv_row(r.to_csv_row()) == r
    assert OutputRecord.from_json(r.to_json()) == r


def test_check_deterministic_and_fault_injection():
    a = format_report(run_checks("fast", 3, only="csformula.zeta_series"), "fast", 3)
    b = format_report(run_checks("fast", 3, only="csformula.zeta_series"), "fast", 3)
    assert a == b and "PASS" in a
    bad = run_checks("fast", 3, inject_fault=True, only="csformula.zeta_series")
    assert not bad[0].passed


def test_check_exit_code(capsys):
    assert run(["check", "--only", "theta."], capsys)[0] == 0
    assert run(["check", "--only", "csformula.zeta_series", "--inject-fault"], capsys)[0] == 1


def test_console_script():
    r = subprocess.run([sys.executable, "-m", "thetazeta.cli", "dump-coeffs", "theta", "--n", "2"],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0 and r.stdout == "index,value\n1,1\n2,-0.5\n"
