"""Command line behavior: files, exit codes, diagnostics, determinism."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from fracpoly.cli import main
from fracpoly.reports import TRACE_COLUMNS, validate_report

ROOT = Path(__file__).resolve().parent.parent
POLY_CONFIG = str(ROOT / "configs" / "example1-poly.json")
FRAC_CONFIG = str(ROOT / "configs" / "scalar-frac.json")
EE_CONFIG = str(ROOT / "configs" / "ee-synthetic.json")
SOS_CONFIG = str(ROOT / "configs" / "sos-square.json")


def _write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


def _load_report(path):
    report = json.loads(Path(path).read_text(encoding="utf-8"))
    validate_report(report)
    return report


def test_solve_poly_certified_run(tmp_path, capsys):
    report_path = tmp_path / "report.json"
    code = main(["solve-poly", POLY_CONFIG, "--report", str(report_path)])
    out = capsys.readouterr().out
    assert code == 0
    assert "certified: yes" in out
    report = _load_report(report_path)
    assert report["problem"]["kind"] == "polynomial"
    assert abs(report["result"]["bound"] - 31 / 7) <= 1e-6
    assert abs(report["result"]["point"][0] + 4 / 7) <= 1e-6


def test_solve_poly_oracle_agrees(capsys):
    code = main(["solve-poly", POLY_CONFIG, "--oracle", "--seed", "3"])
    out = capsys.readouterr().out
    assert code == 0
    assert "bound consistent: yes" in out


def test_solve_frac_trace_csv(tmp_path, capsys):
    trace = tmp_path / "trace.csv"
    report_path = tmp_path / "report.json"
    code = main([
        "solve-frac", FRAC_CONFIG,
        "--trace", str(trace), "--report", str(report_path),
    ])
    assert code == 0
    lines = trace.read_text(encoding="utf-8").splitlines()
    assert lines[0] == ",".join(TRACE_COLUMNS)
    assert len(lines) >= 4
    assert trace.read_text(encoding="utf-8").endswith("\n")
    assert "\r" not in trace.read_text(encoding="utf-8")
    assert trace.with_suffix(".png").exists()
    report = _load_report(report_path)
    assert abs(report["result"]["lambda"] - 0.5) <= 1e-6
    assert report["result"]["trace_summary"]["rows"] == len(lines) - 1


def test_solve_frac_min_sense_negates(tmp_path, capsys):
    problem = {
        "n": 1,
        "sense": "min",
        "objective": {
            "numerator": {"n": 1, "terms": [{"exp": [1], "c": -1.0}]},
            "denominator": {"n": 1, "terms": [{"exp": [0], "c": 1.0},
                                              {"exp": [2], "c": 1.0}]},
        },
        "constraints": [{"n": 1, "terms": [{"exp": [1], "c": 2.0},
                                           {"exp": [2], "c": -1.0}]}],
        "options": {"order": 2},
    }
    path = _write(tmp_path, "minfrac.json", problem)
    report_path = tmp_path / "report.json"
    code = main(["solve-frac", path, "--report", str(report_path)])
    assert code == 0
    report = _load_report(report_path)
    # min of -x/(1+x^2) on [0, 2] is -1/2
    assert abs(report["result"]["lambda"] + 0.5) <= 1e-6
    assert report["result"]["notes"]


def test_byte_identical_reruns(tmp_path):
    first = tmp_path / "a"
    second = tmp_path / "b"
    for base in (first, second):
        base.mkdir()
        code = main([
            "solve-frac", FRAC_CONFIG,
            "--trace", str(base / "trace.csv"),
            "--report", str(base / "report.json"),
        ])
        assert code == 0
    for name in ("trace.csv", "trace.png", "report.json"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_solve_ee_outputs(tmp_path, capsys):
    trace = tmp_path / "ee-trace.csv"
    grid = tmp_path / "ee-grid.csv"
    report_path = tmp_path / "ee-report.json"
    code = main([
        "solve-ee", EE_CONFIG,
        "--trace", str(trace), "--grid", str(grid),
        "--report", str(report_path),
    ])
    out = capsys.readouterr().out
    assert code == 0
    assert "rounded point: (16, 125)" in out
    header = grid.read_text(encoding="utf-8").splitlines()[0]
    assert header == "K,M,EE,feasible"
    assert trace.with_suffix(".png").exists()
    assert grid.with_suffix(".png").exists()
    # no oracle was requested, so no error curve is written
    assert not (tmp_path / "ee-trace-epsilon.csv").exists()
    report = _load_report(report_path)
    assert report["result"]["rounded_point"] == [16, 125]
    assert report["result"]["rounded_feasible"] is True
    assert "epsilon" not in report["result"]


def test_certify_sos_accepts_square(tmp_path, capsys):
    report_path = tmp_path / "sos.json"
    code = main(["certify-sos", SOS_CONFIG, "--report", str(report_path)])
    out = capsys.readouterr().out
    assert code == 0
    assert "sum of squares" in out
    report = _load_report(report_path)
    assert report["result"]["status"] == "sos"
    assert report["result"]["residual"] <= 1e-7


def test_certify_sos_rejects_motzkin(tmp_path, capsys):
    motzkin = _write(tmp_path, "motzkin.json", {
        "n": 2,
        "terms": [
            {"exp": [4, 2], "c": 1.0},
            {"exp": [2, 4], "c": 1.0},
            {"exp": [2, 2], "c": -3.0},
            {"exp": [0, 0], "c": 1.0},
        ],
    })
    report_path = tmp_path / "sos.json"
    code = main(["certify-sos", motzkin, "--report", str(report_path)])
    out = capsys.readouterr().out
    assert code == 2
    assert "not a sum of squares" in out
    report = _load_report(report_path)
    assert report["result"]["status"] == "not_sos"
    assert report["result"]["certified"] is False


def test_example1_prints_certificate_and_erratum(capsys):
    code = main(["example1"])
    out = capsys.readouterr().out
    assert code == 0
    assert "monomial basis at order 1: [1, x1, x2]" in out
    assert "moment matrix (3 x 3)" in out
    assert "4.42857142" in out
    assert "[9, 0, -4, 2, 1, 2]" in out
    assert "(-1, 2)" in out
    assert "31/7" in out


def test_json_parse_error_reports_position(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 1,\n  "sense": oops\n}', encoding="utf-8")
    code = main(["solve-poly", str(bad)])
    err = capsys.readouterr().err
    assert code == 1
    assert f"{bad}:2:" in err


def test_schema_error_reports_json_path(tmp_path, capsys):
    path = _write(tmp_path, "bad.json", {
        "n": 1, "sense": "down",
        "objective": {"n": 1, "terms": [{"exp": [1], "c": 1.0}]},
    })
    code = main(["solve-poly", path])
    err = capsys.readouterr().err
    assert code == 1
    assert "$.sense" in err


def test_missing_file_is_an_error(capsys):
    code = main(["solve-poly", "/nonexistent/problem.json"])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_infeasible_problem_writes_nothing(tmp_path, capsys):
    problem = {
        "n": 1,
        "sense": "max",
        "objective": {
            "numerator": {"n": 1, "terms": [{"exp": [1], "c": 1.0}]},
            "denominator": {"n": 1, "terms": [{"exp": [0], "c": 1.0},
                                              {"exp": [2], "c": 1.0}]},
        },
        "constraints": [
            {"n": 1, "terms": [{"exp": [1], "c": 1.0}, {"exp": [0], "c": -1.0}]},
            {"n": 1, "terms": [{"exp": [1], "c": -1.0}]},
        ],
        "options": {"order": 2},
    }
    path = _write(tmp_path, "infeasible.json", problem)
    trace = tmp_path / "trace.csv"
    code = main(["solve-frac", path, "--trace", str(trace)])
    err = capsys.readouterr().err
    assert code == 1
    assert "infeasible" in err
    assert not trace.exists()


def test_subcommand_objective_mismatch(tmp_path, capsys):
    code = main(["solve-poly", FRAC_CONFIG])
    assert code == 1
    assert "solve-frac" in capsys.readouterr().err
    code = main(["solve-frac", POLY_CONFIG])
    assert code == 1
    assert "solve-poly" in capsys.readouterr().err


def test_uncertified_run_exits_two(tmp_path, capsys):
    # two symmetric minimizers defeat rank-one extraction
    problem = {
        "n": 1,
        "sense": "min",
        "objective": {"n": 1, "terms": [{"exp": [4], "c": 1.0},
                                        {"exp": [2], "c": -1.0}]},
        "constraints": [{"n": 1, "terms": [{"exp": [0], "c": 1.0},
                                           {"exp": [2], "c": -1.0}]}],
        "options": {"order": 2},
    }
    path = _write(tmp_path, "twomin.json", problem)
    code = main(["solve-poly", path])
    out = capsys.readouterr().out
    assert code == 2
    assert "certified: no" in out


def test_invalid_flag_value_rejected(tmp_path, capsys):
    code = main(["solve-frac", FRAC_CONFIG, "--eps", "-1.0"])
    assert code == 1
    assert "positive" in capsys.readouterr().err
