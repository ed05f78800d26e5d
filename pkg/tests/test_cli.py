import csv
import math

import pytest

from gfm_mpc.analysis import read_cct_csv, read_doa_csv, read_trajectory_sweep_csv
from gfm_mpc.cli import EXIT_CONFIG, EXIT_DEGENERATE, EXIT_OK, main
from gfm_mpc.config import ScenarioConfig, defaults_toml, parse_config
from gfm_mpc.mpc import read_solve_log
from gfm_mpc.plant import TrajectoryRecord


def write_config(tmp_path, *edits, name="case.toml"):
    text = defaults_toml()
    for old, new in edits:
        assert old in text, old
        text = text.replace(old, new, 1)
    path = tmp_path / name
    path.write_text(text)
    return path


NO_FAULT = ("enabled = true", "enabled = false")


def test_print_defaults_round_trips(capsys):
    assert main(["--print-defaults"]) == EXIT_OK
    text = capsys.readouterr().out
    assert parse_config(text) == ScenarioConfig()


def test_missing_subcommand_is_config_error(capsys):
    assert main([]) == EXIT_CONFIG


def test_malformed_value_reports_line(tmp_path, capsys):
    path = write_config(tmp_path, ("h = 2.0", 'h = "two"'))
    assert main(["landmarks", "--config", str(path)]) == EXIT_CONFIG
    err = capsys.readouterr().err
    line = next(i for i, s in enumerate(path.read_text().splitlines(), 1) if s.startswith("h = "))
    assert f"line {line}" in err


def test_unknown_key_reports_line(tmp_path, capsys):
    path = write_config(tmp_path, ("d_q = 0.1", "d_q = 0.1\ninertia = 3.0"))
    assert main(["landmarks", "--config", str(path)]) == EXIT_CONFIG
    assert "inertia" in capsys.readouterr().err


def test_toml_syntax_error_reports_line(tmp_path, capsys):
    path = write_config(tmp_path, ("[grid]", "[grid"))
    assert main(["landmarks", "--config", str(path)]) == EXIT_CONFIG
    assert "line" in capsys.readouterr().err


def test_unknown_strategy_is_config_error(capsys):
    assert main(["simulate", "--strategy", "strategy_d"]) == EXIT_CONFIG


def test_landmarks_table(capsys):
    assert main(["landmarks"]) == EXIT_OK
    out = capsys.readouterr().out
    for value in ("0.4079", "0.5563", "1.5439", "2.3562", "2.7337"):
        assert value in out


def test_landmarks_zero_power(tmp_path, capsys):
    path = write_config(tmp_path, ("p0 = 0.871", "p0 = 0.0"))
    assert main(["landmarks", "--config", str(path)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "theta_eq        : 0.0000" in out and "3.1416" in out


def test_landmarks_absent_equilibrium(tmp_path, capsys):
    path = write_config(tmp_path, ("i_s_max = 1.2", "i_s_max = 0.5"))
    assert main(["landmarks", "--config", str(path)]) == EXIT_OK
    assert "absent" in capsys.readouterr().out


def test_simulate_no_fault_is_flat(tmp_path, capsys):
    path = write_config(tmp_path, NO_FAULT)
    assert main(["simulate", "--config", str(path), "--out", str(tmp_path)]) == EXIT_OK
    assert "StableSafe" in capsys.readouterr().out
    traj = TrajectoryRecord.from_csv(tmp_path / "trajectory.csv")
    assert max(traj.theta) - min(traj.theta) < 1e-9


def test_simulate_original_base_case_is_unsafe(tmp_path, capsys):
    assert main(["simulate", "--out", str(tmp_path)]) == EXIT_OK
    assert "UnsafeUnstable" in capsys.readouterr().out


def test_simulate_mpc_writes_solve_log(tmp_path, capsys):
    assert main(["simulate", "--strategy", "mpc", "--out", str(tmp_path)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "StableSafe" in out or "StableAfterCorrection" in out
    rows = read_solve_log(tmp_path / "solve_log.csv")
    assert rows and all(r[3] >= 0 for r in rows)


def test_simulate_is_byte_reproducible(tmp_path):
    for d in ("a", "b"):
        assert main(["simulate", "--strategy", "bound", "--out", str(tmp_path / d)]) == EXIT_OK
    assert (tmp_path / "a" / "trajectory.csv").read_bytes() == (tmp_path / "b" / "trajectory.csv").read_bytes()


def test_cct_rows_and_tolerance_guard(tmp_path, capsys):
    assert main(["cct", "--strategy", "original", "--tol", "0.002", "--out", str(tmp_path)]) == EXIT_OK
    (row,) = read_cct_csv(tmp_path / "cct.csv")
    assert row.strategy == "original" and 0.1 < row.cct_s < 0.2
    assert main(["cct", "--tol", "1e-5", "--out", str(tmp_path)]) == EXIT_CONFIG


def test_cct_degenerate_exit_code(tmp_path, capsys):
    path = write_config(tmp_path, ("i_s_max = 1.2", "i_s_max = 0.5"))
    code = main(["cct", "--config", str(path), "--strategy", "original", "--out", str(tmp_path)])
    assert code == EXIT_DEGENERATE
    assert "degenerate" in capsys.readouterr().err


def test_doa_single_point(tmp_path, capsys):
    path = write_config(tmp_path, ("n_theta = 40", "n_theta = 1"), ("tol = 0.0001", "tol = 0.002"))
    assert main(["doa", "--config", str(path), "--strategy", "original", "--out", str(tmp_path)]) == EXIT_OK
    with open(tmp_path / "doa.csv") as fh:
        assert len(list(csv.reader(fh))) == 2
    curves = read_doa_csv(tmp_path / "doa.csv")
    assert list(curves) == ["original"]


def test_doa_cl0_family(tmp_path, capsys):
    path = write_config(tmp_path, ("n_theta = 40", "n_theta = 3"), ("tol = 0.0001", "tol = 0.001"),
                        ("delta_p_ref_max_values = []", "delta_p_ref_max_values = [0.3, 1.5]"))
    assert main(["doa", "--config", str(path), "--strategy", "cl0", "--out", str(tmp_path)]) == EXIT_OK
    curves = read_doa_csv(tmp_path / "doa.csv")
    assert set(curves) == {"cl0_dpmax=0.3", "cl0_dpmax=1.5"}
    assert all(a <= b + 1e-3 for a, b in zip(curves["cl0_dpmax=0.3"][1], curves["cl0_dpmax=1.5"][1]))


def test_sweep_impedance_error(tmp_path, capsys):
    path = write_config(tmp_path, ('kind = "fault_voltage"', 'kind = "impedance_error"'),
                        ("\nvalues = []", "\nvalues = [1.1]"))
    assert main(["sweep", "--config", str(path), "--out", str(tmp_path)]) == EXIT_OK
    (row,) = read_trajectory_sweep_csv(tmp_path / "trajectory_sweep.csv")
    assert row.param == 1.1 and row.strategy == "mpc"
    assert row.classification in ("StableSafe", "StableAfterCorrection")
    assert not math.isnan(row.settle_time)


def test_sweep_kind_argument_uses_its_own_defaults():
    from gfm_mpc.cli import DEFAULT_SWEEP_VALUES

    assert all(v >= 0.06 for v in DEFAULT_SWEEP_VALUES["horizon"])
    assert len(DEFAULT_SWEEP_VALUES["fault_voltage"]) >= 6 and len(DEFAULT_SWEEP_VALUES["reference_power"]) >= 6


@pytest.mark.parametrize("kind", ["fault_voltage"])
def test_sweep_cct_kind_single_point(tmp_path, kind, capsys):
    path = write_config(tmp_path, ("\nvalues = []", "\nvalues = [0.2]"),
                        ('strategies = ["original", "bound", "compensation", "mpc"]', 'strategies = ["original"]'))
    assert main(["sweep", kind, "--config", str(path), "--tol", "0.005", "--out", str(tmp_path)]) == EXIT_OK
    (row,) = read_cct_csv(tmp_path / "cct_sweep.csv")
    assert row.param == 0.2 and row.cct_s > 0
