import csv
import json
import math

import numpy as np
import pytest

from rotcyl import InvariantViolation, circle_curve
from rotcyl.cli import main
from rotcyl.config import RunConfig, SolverConfig
from rotcyl.io import read_curve_csv, write_curve_csv


def _meta(path):
    return dict(line[2:].split("=", 1) for line in path.read_text().splitlines() if line.startswith("#"))


# -- curve files -----------------------------------------------------------

def test_round_trip_bit_exact(tmp_path, peanut):
    for curve in (circle_curve(1.3, 0.7, 256), peanut):
        path = tmp_path / "c.csv"
        write_curve_csv(path, curve)
        back = read_curve_csv(path)
        for attr in ("points", "theta", "kappa"):
            assert np.array_equal(getattr(back, attr), getattr(curve, attr))
        assert back.length == curve.length
        assert back.params == curve.params


def test_curve_file_layout(tmp_path):
    path = tmp_path / "c.csv"
    write_curve_csv(path, circle_curve(1.0, 0.0, 64))
    meta = _meta(path)
    assert list(meta) == ["a", "b", "k", "n", "L", "n_samples", "closure_residual"]
    rows = list(csv.reader(l for l in path.read_text().splitlines() if not l.startswith("#")))
    assert rows[0] == ["s", "x1", "x2", "theta", "kappa"]
    assert len(rows) == 65


def _corrupt(tmp_path, mutate):
    path = tmp_path / "c.csv"
    write_curve_csv(path, circle_curve(1.0, 1.0, 64))
    lines = path.read_text().splitlines()
    path.write_text("\n".join(mutate(lines)) + "\n")
    return path


@pytest.mark.parametrize("mutate,name", [
    (lambda ls: ls[:-1], "n_samples"),
    (lambda ls: [l.replace("# b=0", "# b=0.5") for l in ls], "curvature_law"),
    (lambda ls: ls[:7] + ["s,x,y,theta,kappa"] + ls[8:], "file_format"),
    (lambda ls: ls[1:], "file_format"),
    (lambda ls: ls[:9] + ["0.1,1,0,1.57,1"] + ls[10:], "sample_grid"),
    (lambda ls: ls[:8] + [",".join(["0"] + l.split(",")[1:]) if i == 5 else l
                          for i, l in enumerate(ls[8:])], "sample_grid"),
])
def test_corrupted_file_names_invariant(tmp_path, mutate, name):
    path = _corrupt(tmp_path, mutate)
    with pytest.raises(InvariantViolation) as exc:
        read_curve_csv(path)
    assert exc.value.name == name


# -- config ----------------------------------------------------------------

def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(n_grid=16)
    with pytest.raises(ValueError):
        SolverConfig(closure_tol=0.0)
    with pytest.raises(ValueError):
        RunConfig.from_dict({"n_grid": 64, "seed": 3})
    run = RunConfig.from_dict({"n_grid": 64, "output_dir": "x"})
    assert run.solver.n_grid == 64 and str(run.output_dir) == "x"
    assert set(RunConfig.keys()) == {"h_ode", "closure_tol", "law_tol", "shoot_tol", "n_grid", "n_t",
                                     "n_s", "m_max", "bisection_tol", "l_max", "output_dir"}


# -- CLI -------------------------------------------------------------------

def test_cli_circle_metadata(tmp_path):
    for a, b in (("1", "0"), ("0", "1")):
        out = tmp_path / f"c{a}.csv"
        assert main(["circle", "--r", "1", "--a", a, "--out", str(out)]) == 0
        assert float(_meta(out)["b"]) == float(b)


@pytest.mark.parametrize("argv", [
    ["circle", "--r", "0", "--a", "1"],
    ["circle", "--a", "1"],
    ["solve", "--a", "1", "--b", "0", "--r0", "2:1"],
    ["sweep", "--a-min", "0", "--a-max", "1", "--steps", "0"],
    ["bogus"],
])
def test_cli_usage_errors(argv, tmp_path):
    code = None
    try:
        code = main(argv + ["--output-dir", str(tmp_path)] if argv[0] != "bogus" else argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 1


def test_cli_config_unknown_key(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n_grid": 64, "colour": "red"}))
    assert main(["circle", "--r", "1", "--a", "0", "--config", str(cfg),
                 "--output-dir", str(tmp_path)]) == 1


def test_cli_flags_override_config(tmp_path, capsys):
    from rotcyl.cli import build_parser, resolve_config

    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n_grid": 64, "n_t": 40, "output_dir": str(tmp_path / "o")}))
    args = build_parser().parse_args(["verify", "--config", str(cfg), "--n-grid", "128"])
    run = resolve_config(args)
    assert run.solver.n_grid == 128 and run.solver.n_t == 40
    assert run.output_dir == tmp_path / "o"


@pytest.mark.parametrize("a,b", [("0", "1"), ("1", "0")])
def test_cli_solve_finds_unit_circle(tmp_path, a, b):
    assert main(["solve", "--a", a, "--b", b, "--k", "1", "--r0", "0.5:2",
                 "--output-dir", str(tmp_path)]) == 0
    summary = json.loads(next(tmp_path.glob("solve_*.json")).read_text())
    assert summary["curves"]
    for entry in summary["curves"]:
        c = read_curve_csv(entry["file"])
        assert np.max(np.abs(np.sqrt(c.radius_sq) - 1)) < 1e-6


def test_cli_solve_no_curve_is_numeric_failure(tmp_path):
    assert main(["solve", "--a", "1", "--b", "-0.5", "--k", "2", "--r0", "0.7:0.9",
                 "--scan-points", "8", "--output-dir", str(tmp_path)]) == 2


def test_cli_analyze(tmp_path, capsys):
    c1 = tmp_path / "c1.csv"
    c0 = tmp_path / "c0.csv"
    main(["circle", "--r", "1", "--a", "1", "--out", str(c1)])
    main(["circle", "--r", "1", "--a", "0", "--out", str(c0)])
    capsys.readouterr()
    assert main(["analyze", str(c1), "--l", "3", "--output-dir", str(tmp_path)]) == 0
    text = capsys.readouterr().out
    assert "constant-mean-curvature" in text
    rep = json.loads((tmp_path / "c1_report.json").read_text())
    assert rep["verdict"]["state"] == "unstable"
    assert rep["theorem1"] == pytest.approx(2.221441, abs=1e-6)
    scan = (tmp_path / "c1_scan.csv").read_text().splitlines()
    assert scan[0] == "l,min_eigenvalue" and len(scan) == 13
    assert main(["analyze", str(c0), "--l", "3", "--no-oracle", "--output-dir", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "c0_report.json").read_text())
    assert rep["verdict"]["state"] == "stable"
    assert rep["theorem2"] == pytest.approx(6.283185, abs=1e-6)
    assert rep["theorem1"] is None and rep["oracle_critical"] is None


def test_cli_analyze_deterministic(tmp_path):
    c = tmp_path / "c.csv"
    main(["circle", "--r", "1", "--a", "0.5", "--out", str(c)])
    docs = []
    for d in ("x", "y"):
        main(["analyze", str(c), "--l", "2", "--no-oracle", "--output-dir", str(tmp_path / d)])
        docs.append((tmp_path / d / "c_report.json").read_text())
    assert docs[0] == docs[1]


def test_cli_analyze_corrupted_file(tmp_path, capsys):
    path = _corrupt(tmp_path, lambda ls: [l.replace("# b=0", "# b=0.5") for l in ls])
    assert main(["analyze", str(path), "--output-dir", str(tmp_path)]) == 3
    assert "curvature_law" in capsys.readouterr().err


def test_cli_analyze_missing_file(tmp_path):
    assert main(["analyze", str(tmp_path / "nope.csv"), "--output-dir", str(tmp_path)]) == 1


def test_cli_sweep_crossover(tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--a-min", "0.05", "--a-max", "0.5", "--steps", "10", "--no-oracle",
                 "--jobs", "4", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert list(rows[0]) == ["a", "b", "theorem1", "theorem2", "stronger", "per_mode_critical",
                             "oracle_critical"]
    avals = [float(r["a"]) for r in rows]
    assert avals == sorted(avals) and len(avals) == 10
    for r in rows:
        a, b = float(r["a"]), float(r["b"])
        assert r["stronger"] == ("theorem2" if a / b ** 2 < 1 / 6 else "theorem1")


def test_cli_sweep_single_step_matches_analyze(tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--a-min", "1", "--a-max", "1", "--steps", "1", "--out", str(out)]) == 0
    row = next(csv.DictReader(out.open()))
    c = tmp_path / "c.csv"
    main(["circle", "--r", "1", "--a", "1", "--out", str(c)])
    main(["analyze", str(c), "--output-dir", str(tmp_path)])
    rep = json.loads((tmp_path / "c_report.json").read_text())
    assert float(row["theorem1"]) == rep["theorem1"]
    assert row["theorem2"] == "n/a" and rep["theorem2"] is None
    assert float(row["per_mode_critical"]) == rep["per_mode_critical"]
    assert float(row["oracle_critical"]) == rep["oracle_critical"]
