import json
import subprocess
import sys

import numpy as np
import pytest

from carasolve.cli import EXIT_ERROR, EXIT_NEGATIVE, EXIT_OK, EXIT_USAGE, main


def run(tmp_path, *args):
    return main([*args, "--out", str(tmp_path)])


def test_solve_floor_certified(tmp_path):
    rc = run(tmp_path, "solve", "--rhs", "floor", "--y0", "1", "--interval", "0", "1.8333",
             "--grid", "4096")
    assert rc == EXIT_OK
    report = json.loads((tmp_path / "solve.json").read_text())
    assert report["certified"] and report["grid_cells"] == 4096
    rows = np.loadtxt(tmp_path / "trajectory.csv", delimiter=",", skiprows=1)
    assert rows.shape == (4097, 5)
    assert abs(np.interp(1.0, rows[:, 0], rows[:, 1]) - 2.0) < 1e-3


def test_solve_refuses_non_increasing(tmp_path, caplog):
    rc = run(tmp_path, "solve", "--rhs", "grande_sign", "--y0", "0", "--interval", "0", "1")
    assert rc == EXIT_NEGATIVE
    assert "NON-CERTIFIED" in caplog.text
    assert not (tmp_path / "solve.json").exists()


def test_solve_forced_heuristic(tmp_path):
    rc = run(tmp_path, "solve", "--rhs", "grande_sign", "--interval", "0", "1", "--grid", "16",
             "--force-heuristic", "--max-iter", "20")
    assert rc == EXIT_NEGATIVE
    report = json.loads((tmp_path / "solve.json").read_text())
    assert not report["certified"]
    assert any("NON-CERTIFIED" in w for w in report["warnings"])


def test_solve_not_converged(tmp_path):
    rc = run(tmp_path, "solve", "--rhs", "linear", "--y0", "1", "--interval", "0", "1",
             "--max-iter", "1")
    assert rc == EXIT_NEGATIVE


def test_solve_missing_interval(tmp_path):
    assert run(tmp_path, "solve", "--rhs", "const", "--param", "1") == EXIT_USAGE


@pytest.mark.parametrize("argv", [
    ["solve", "--rhs", "nope", "--interval", "0", "1"],
    ["solve", "--rhs", "const", "--interval", "0"],
    ["solve", "--rhs", "const", "--interval", "1", "0"],
    ["solve", "--rhs", "const", "--interval", "0", "1", "--grid", "0"],
    ["approx", "--rhs", "floor", "--window", "1", "-1"],
    ["bogus"],
    [],
])
def test_usage_errors(tmp_path, argv):
    # argparse failures exit directly, validation failures return the code
    try:
        code = run(tmp_path, *argv)
    except SystemExit as exc:
        code = exc.code
    assert code == EXIT_USAGE


def test_runtime_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    rc = main(["solve", "--rhs", "const", "--interval", "0", "1", "--out", str(blocker / "x")])
    assert rc == EXIT_ERROR


def test_bad_parameters_are_errors(tmp_path):
    rc = run(tmp_path, "solve", "--rhs", "floor", "--param", "2", "--interval", "0", "1")
    assert rc == EXIT_ERROR


def test_approx_csv_and_json(tmp_path):
    assert run(tmp_path, "approx", "--rhs", "grande_sin", "--seed", "1",
               "--n-list", "4", "16", "--points", "5") == EXIT_OK
    lines = (tmp_path / "convergence.csv").read_text().splitlines()
    assert lines[0] == "x,y,n,deviation" and len(lines) == 11
    assert run(tmp_path, "approx", "--rhs", "const", "--param", "2", "--format", "json",
               "--n-list", "2", "4", "--points", "3") == EXIT_OK
    data = json.loads((tmp_path / "convergence.json").read_text())
    assert all(r["deviation"] == 0.0 for r in data["rows"])


def _write_candidate(path, xs, vs, header="x,z"):
    path.write_text(header + "\n" + "".join(f"{x!r},{v!r}\n" for x, v in zip(xs, vs)))


def test_verify_member_and_not(tmp_path):
    xs = [float(x) for x in np.linspace(0, 1, 33)]
    good = tmp_path / "good.csv"
    _write_candidate(good, xs, xs)
    assert run(tmp_path, "verify", "--rhs", "const", "--param", "1",
               "--candidate", str(good)) == EXIT_OK
    report = json.loads((tmp_path / "verify.json").read_text())
    assert report["subsolution"]["is_member"]
    bad = tmp_path / "bad.csv"
    _write_candidate(bad, xs, [2 * x for x in xs])
    assert run(tmp_path, "verify", "--rhs", "const", "--param", "1",
               "--candidate", str(bad)) == EXIT_NEGATIVE


def test_verify_reads_solver_trajectory(tmp_path):
    assert run(tmp_path, "solve", "--rhs", "sqrt_plus", "--interval", "0", "1",
               "--grid", "512") == EXIT_OK
    assert run(tmp_path, "verify", "--rhs", "sqrt_plus",
               "--candidate", str(tmp_path / "trajectory.csv")) == EXIT_OK


def test_verify_bad_inputs(tmp_path):
    assert run(tmp_path, "verify", "--rhs", "floor") == EXIT_USAGE
    assert run(tmp_path, "verify", "--rhs", "floor",
               "--candidate", str(tmp_path / "missing.csv")) == EXIT_ERROR
    junk = tmp_path / "junk.csv"
    junk.write_text("x,z\n0,a\n1,b\n")
    assert run(tmp_path, "verify", "--rhs", "floor", "--candidate", str(junk)) == EXIT_USAGE
    off = tmp_path / "off.csv"
    _write_candidate(off, [0.0, 1.0], [5.0, 5.0])
    assert run(tmp_path, "verify", "--rhs", "floor", "--candidate", str(off)) == EXIT_ERROR


def test_demo_sign(tmp_path):
    assert run(tmp_path, "demo", "sign", "--interval", "0", "1") == EXIT_OK
    report = json.loads((tmp_path / "sign_report.json").read_text())
    assert report["checks"]["limit_residual_matches"]
    assert (tmp_path / "sign_candidate_00.csv").read_text().startswith("x,y\n")


def test_demo_sin_small(tmp_path):
    assert run(tmp_path, "demo", "sin", "--steps", "0.01", "--n0-max", "20") == EXIT_OK
    report = json.loads((tmp_path / "sin_report.json").read_text())
    assert all(report["checks"].values())
    assert run(tmp_path, "demo", "sin", "--interval", "1", "2") == EXIT_USAGE


def test_demo_positive(tmp_path):
    assert run(tmp_path, "demo", "positive", "--rhs", "const", "--param", "2") == EXIT_OK
    report = json.loads((tmp_path / "positive.json").read_text())
    assert report["params"] == [2.0] and report["max_dev_maximal"] < 1e-12
    assert run(tmp_path, "demo", "positive", "--rhs", "linear", "--max-iter", "1") == EXIT_NEGATIVE
    assert run(tmp_path, "demo", "positive", "--rhs", "grande_sin") == EXIT_USAGE


def test_config_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"rhs": "const", "param": [3.0], "interval": [0, 2], "grid": 8}))
    assert run(tmp_path, "solve", "--config", str(cfg)) == EXIT_OK
    report = json.loads((tmp_path / "solve.json").read_text())
    assert report["grid_cells"] == 8 and report["z0_at_b"] == 6.0
    assert run(tmp_path, "solve", "--config", str(cfg), "--grid", "4", "--y0", "1") == EXIT_OK
    report = json.loads((tmp_path / "solve.json").read_text())
    assert report["grid_cells"] == 4 and report["z0_at_b"] == 7.0


def test_config_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"gird": 3}))
    assert run(tmp_path, "solve", "--config", str(bad)) == EXIT_USAGE
    bad.write_text("[1, 2]")
    assert run(tmp_path, "solve", "--config", str(bad)) == EXIT_USAGE
    assert run(tmp_path, "solve", "--config", str(tmp_path / "none.json")) == EXIT_USAGE


@pytest.mark.parametrize("argv", [
    ["solve", "--rhs", "sqrt_plus", "--interval", "0", "1", "--grid", "256"],
    ["approx", "--rhs", "floor", "--seed", "7", "--points", "4", "--n-list", "8", "32"],
    ["demo", "sign", "--steps", "0.1", "0.01"],
])
def test_outputs_byte_identical(tmp_path, argv):
    a, b = tmp_path / "a", tmp_path / "b"
    main([*argv, "--out", str(a)])
    main([*argv, "--out", str(b)])
    files = sorted(p.name for p in a.iterdir())
    assert files and files == sorted(p.name for p in b.iterdir())
    for name in files:
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "carasolve", "solve", "--rhs", "const", "--param", "1"],
        capture_output=True, text=True,
    )
    assert proc.returncode == EXIT_USAGE and "--interval" in proc.stderr
