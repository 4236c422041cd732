import csv
import json

import numpy as np
import pytest

from advec import cli
from advec.acceptance import CheckResult
from advec.cli import MATRIX_COLUMNS, RunConfig, main, run, run_matrix
from advec.exceptions import ConfigurationError
from advec.problems import init_example1, simulate
from advec.schemes import SchemeSpec

METRIC_KEYS = {"problem", "scheme", "level", "steps", "status", "mass_drift", "table1_window",
               "corner_max", "l1_error", "linf_error", "shock_position"}


def read_profile(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_run_writes_outputs(tmp_path):
    _, metrics = run(RunConfig(steps=20, snapshots=(0, 10)), tmp_path)
    for name in ("profile.csv", "profile_000000.csv", "profile_000010.csv", "series.csv",
                 "metrics.json"):
        assert (tmp_path / name).exists()
    on_disk = json.loads((tmp_path / "metrics.json").read_text())
    assert set(on_disk) == METRIC_KEYS
    assert on_disk == json.loads(json.dumps(metrics))
    assert len(read_profile(tmp_path / "series.csv")) == 21


def test_zero_steps_reproduces_initial_condition(tmp_path):
    run(RunConfig(steps=0), tmp_path)
    _, f0 = init_example1()
    rows = read_profile(tmp_path / "profile.csv")
    assert np.array_equal([float(r["f"]) for r in rows], f0)
    assert all(r["f"] == r["exact"] for r in rows)


def test_run_is_deterministic(tmp_path):
    cfg = RunConfig(problem="example2", scheme="rational", level=0, steps=50)
    run(cfg, tmp_path / "a")
    run(cfg, tmp_path / "b")
    for name in ("profile.csv", "series.csv", "metrics.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_csv_round_trip_continues_the_run(tmp_path):
    run(RunConfig(steps=100), tmp_path / "first")
    run(RunConfig(init_csv=str(tmp_path / "first" / "profile.csv"), steps=100), tmp_path / "second")
    problem, _ = init_example1()
    _, state = simulate(problem, SchemeSpec("hcr", 1), steps=200)
    rows = read_profile(tmp_path / "second" / "profile.csv")
    assert np.array_equal([float(r["f"]) for r in rows], state.f)
    assert np.array_equal([float(r["rho"]) for r in rows], state.rho)


def test_config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# comment\nproblem = example2\nscheme = cubic\nlevel = 0\nsnapshots = 1, 2\n")
    cfg = RunConfig.from_file(path, steps=3)
    assert (cfg.problem, cfg.scheme, cfg.level, cfg.steps, cfg.snapshots) == (
        "example2", "cubic", 0, 3, (1, 2))
    path.write_text("bogus = 1\n")
    with pytest.raises(ConfigurationError):
        RunConfig.from_file(path)


@pytest.mark.parametrize("argv", [
    ["run", "--problem", "example1", "--cfl", "1.5"],
    ["run", "--problem", "nowhere"],
    ["run", "--scheme", "quintic"],
    ["run", "--problem", "example1", "--level", "2"],
    ["run", "--problem", "example3_burgers", "--level", "2"],
    ["run", "--steps", "5", "--snapshots", "9"],
])
def test_configuration_errors_exit_2(argv, tmp_path):
    assert main(argv + ["--out", str(tmp_path)]) == 2


def test_cfl_abort_exits_3_with_partial_output(tmp_path, capsys):
    code = main(["run", "--problem", "example3_burgers", "--dt", "12", "--steps", "5",
                 "--out", str(tmp_path)])
    assert code == 3
    metrics = json.loads((tmp_path / "example3_burgers_hcr_L1" / "metrics.json").read_text())
    assert metrics["status"] == "error"
    assert (tmp_path / "example3_burgers_hcr_L1" / "series.csv").exists()


def test_env_var_sets_output_root(tmp_path, monkeypatch):
    monkeypatch.setenv("ADVEC_OUT", str(tmp_path))
    assert main(["run", "--steps", "2"]) == 0
    assert (tmp_path / "example1_hcr_L1" / "metrics.json").exists()


def test_matrix_rows(tmp_path):
    configs = [RunConfig(problem="example2", scheme=s, level=lv, steps=40)
               for lv in (0, 1) for s in ("hcr", "cubic")]
    configs.append(RunConfig(problem="example2", scheme="hcr", level=1, steps=40))
    rows = run_matrix(configs, tmp_path)
    assert len(rows) == 5 and all(r["status"] == "ok" for r in rows)
    with open(tmp_path / "comparison.csv", newline="") as fh:
        table = list(csv.reader(fh))
    assert tuple(table[0]) == MATRIX_COLUMNS
    assert len(table) == 6
    # duplicate configurations produce identical rows
    assert table[3] == table[5]


def test_matrix_records_failures_per_row(tmp_path):
    rows = run_matrix([RunConfig(steps=5), RunConfig(scheme="hcr", level=2, steps=5)], tmp_path)
    assert rows[0]["status"] == "ok"
    assert rows[1]["status"].startswith("error")


def test_matrix_parallel_matches_serial(tmp_path):
    configs = [RunConfig(scheme=s, steps=30) for s in ("hcr", "rational")]
    run_matrix(configs, tmp_path / "serial")
    run_matrix(configs, tmp_path / "parallel", jobs=2)
    assert ((tmp_path / "serial" / "comparison.csv").read_bytes()
            == (tmp_path / "parallel" / "comparison.csv").read_bytes())


def test_verify_exit_codes(monkeypatch, capsys):
    monkeypatch.setattr("advec.acceptance.CHECKS", (lambda: CheckResult("ok", True, "fine"),))
    assert main(["verify"]) == 0
    monkeypatch.setattr("advec.acceptance.CHECKS", (lambda: CheckResult("bad", False, "no"),))
    assert main(["verify"]) == 1
    assert "[FAIL] bad" in capsys.readouterr().out


def test_matrix_command(tmp_path):
    assert main(["matrix", "--problem", "example1", "--steps", "5", "--schemes", "hcr,cubic",
                 "--levels", "0,1", "--out", str(tmp_path)]) == 0
    with open(tmp_path / "comparison.csv", newline="") as fh:
        assert len(list(csv.reader(fh))) == 5


def test_parser_has_three_commands():
    parser = cli.build_parser()
    with pytest.raises(SystemExit):
        parser.parse_args([])
