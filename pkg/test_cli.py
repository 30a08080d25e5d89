"""
Tests for the command-line front end.
"""
import json

import pytest

import nhqsim
from config.run_config import dump_run_config, parse_run_config
from core.errors import ExitStatus, NumericalFailure
from utils.file_utils import load_json, read_csv


@pytest.fixture(autouse=True)
def no_env_override(monkeypatch):
    monkeypatch.delenv("NHQSIM_OUT", raising=False)


def write_config(tmp_path, system, task=None, initial_state=None, name="run.json"):
    data = {"schema_version": 1, "system": system}
    if task is not None:
        data["task"] = task
    if initial_state is not None:
        data["initial_state"] = initial_state
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


def run(*argv):
    return nhqsim.main([str(a) for a in argv])


def test_spectrum_hermitian_qubit_has_no_ep_rows(tmp_path):
    config = write_config(tmp_path, {"n": 1, "omega": 1.0},
                          {"sweep": {"parameter": "omega", "start": 0.5, "stop": 2.0, "points": 4}})
    out = tmp_path / "out"
    assert run("spectrum", "--config", config, "--out", out, "--threads", 1) == ExitStatus.SUCCESS
    assert len(read_csv(out / "spectrum.csv")["omega"]) == 4
    assert all(len(column) == 0 for column in read_csv(out / "ep_scan.csv").values())
    assert (out / "run_metadata.json").exists()


def test_spectrum_reports_exceptional_point(tmp_path):
    config = write_config(tmp_path, {"n": 3, "omega": 1.0, "gamma": 6.0},
                          {"sweep": {"parameter": "omega", "start": 1.0, "stop": 2.0, "points": 3}})
    out = tmp_path / "out"
    assert run("spectrum", "--config", config, "--out", out) == ExitStatus.SUCCESS
    scan = read_csv(out / "ep_scan.csv")
    assert scan["value"] == [1.5]
    assert scan["order_estimate"] == [8]


def test_malformed_config_exits_one(tmp_path):
    config = write_config(tmp_path, {"n": 1, "omega": 1.0, "gamma": -6.0}, {"times": [0, 1]})
    assert run("evolve", "--config", config, "--out", tmp_path / "out") == ExitStatus.USAGE_ERROR


def test_missing_config_exits_one(tmp_path):
    assert run("evolve", "--out", tmp_path) == ExitStatus.USAGE_ERROR
    assert run("evolve", "--config", tmp_path / "nope.json") == ExitStatus.USAGE_ERROR


def test_missing_task_block_exits_one(tmp_path):
    config = write_config(tmp_path, {"n": 1, "omega": 1.0})
    assert run("map", "--config", config, "--out", tmp_path / "out") == ExitStatus.USAGE_ERROR


def test_evolve_single_time(tmp_path):
    config = write_config(tmp_path, {"n": 3, "omega": 1.576, "gamma": 6.0, "coupling": 1e-3}, {"times": [0.0]})
    out = tmp_path / "out"
    assert run("evolve", "--config", config, "--out", out) == ExitStatus.SUCCESS
    trajectory = read_csv(out / "trajectory.csv")
    assert len([name for name in trajectory if name.startswith("abs_")]) == 8
    assert list(trajectory)[2] == "abs_fff"
    report = read_csv(out / "report.csv")
    assert len(report["time"]) == 1
    assert [report[f"S_{j}"][0] for j in (1, 2, 3)] == pytest.approx([0.0, 0.0, 0.0], abs=1e-12)
    assert all((out / f"bloch_q{j}.csv").exists() for j in (1, 2, 3))


def test_evolve_five_qubits(tmp_path):
    config = write_config(tmp_path, {"n": 5, "omega": 1.6, "gamma": 6.0, "coupling": 1e-3},
                          {"times": {"start": 0, "stop": 2, "points": 3}, "bloch_qubits": [1]})
    out = tmp_path / "out"
    assert run("evolve", "--config", config, "--out", out) == ExitStatus.SUCCESS
    assert report_columns(out) >= 5
    assert not (out / "bloch_q2.csv").exists()


def report_columns(out):
    return len([name for name in read_csv(out / "report.csv") if name.startswith("S_")])


def test_reruns_are_byte_identical(tmp_path):
    config = write_config(tmp_path, {"n": 3, "omega": 1.576, "gamma": 6.0, "coupling": 1e-3},
                          {"times": {"start": 0, "stop": 6.5, "points": 11}, "targets": ["ghz_minus_i"]})
    for name in ("a", "b"):
        assert run("evolve", "--config", config, "--out", tmp_path / name, "--threads", 3) == ExitStatus.SUCCESS
    for table in ("trajectory.csv", "report.csv", "bloch_q1.csv"):
        assert (tmp_path / "a" / table).read_bytes() == (tmp_path / "b" / table).read_bytes()


def test_environment_overrides_out(tmp_path, monkeypatch):
    config = write_config(tmp_path, {"n": 1, "omega": 1.0}, {"times": [0.0, 1.0]})
    forced = tmp_path / "forced"
    monkeypatch.setenv("NHQSIM_OUT", str(forced))
    assert run("evolve", "--config", config, "--out", tmp_path / "ignored") == ExitStatus.SUCCESS
    assert (forced / "trajectory.csv").exists()
    assert not (tmp_path / "ignored").exists()


def test_map_and_optimize(tmp_path):
    task = {"times": {"start": 0, "stop": 6.5, "points": 5}, "j_grid": [1e-4, 1e-3],
            "box": {"t": [3.0, 3.5], "J": [1e-3, 1e-3]}}
    config = write_config(tmp_path, {"n": 3, "omega": 1.576, "gamma": 6.0, "coupling": 1e-3}, task)
    out = tmp_path / "out"
    assert run("map", "--config", config, "--out", out) == ExitStatus.SUCCESS
    assert len(read_csv(out / "map.csv")["tau123"]) == 10
    assert run("optimize", "--config", config, "--out", out) == ExitStatus.SUCCESS
    assert 3.0 <= read_csv(out / "optimum.csv")["t"][0] <= 3.5


def test_optimize_inverted_box_exits_one(tmp_path):
    config = write_config(tmp_path, {"n": 3, "omega": 1.576, "gamma": 6.0},
                          {"box": {"t": [6.5, 0.0], "J": [1e-3, 1e-3]}})
    assert run("optimize", "--config", config, "--out", tmp_path / "out") == ExitStatus.USAGE_ERROR


def test_fidelity_default_targets(tmp_path):
    config = write_config(tmp_path, {"n": 3, "omega": 10.0, "coupling": 0.4}, {"times": [0.0, 7.775]},
                          initial_state={"kind": "all_f"})
    out = tmp_path / "out"
    assert run("fidelity", "--config", config, "--out", out) == ExitStatus.SUCCESS
    table = read_csv(out / "fidelity.csv")
    assert set(table) >= {"F_ghz_minus_i", "F_ghz_plus_i", "F_ghz_class"}


def test_unknown_scenario_exits_one(tmp_path):
    assert run("reproduce", "fig9_unknown", "--out", tmp_path) == ExitStatus.USAGE_ERROR


def test_reproduce_quick(tmp_path):
    assert run("reproduce", "fig3_traces", "--quick", "--out", tmp_path) == ExitStatus.SUCCESS
    assert (tmp_path / "fig3_traces" / "manifest.csv").exists()
    metadata = load_json(tmp_path / "run_metadata.json")
    assert "fig3_traces/manifest.csv" in metadata["files"]


def test_show_config_round_trip(tmp_path, capsys):
    config = write_config(tmp_path, {"n": 2, "omega": [1.0, 1.1], "gamma": 6.0}, {"times": [0, 1]})
    assert run("show-config", "--config", config) == ExitStatus.SUCCESS
    echoed = capsys.readouterr().out
    original = parse_run_config(json.loads(config.read_text()))
    assert parse_run_config(json.loads(echoed)) == original
    assert json.loads(echoed)["units"]["omega"] == "rad/us"
    assert echoed == dump_run_config(original)


def test_show_config_write(tmp_path):
    config = write_config(tmp_path, {"n": 1, "omega": 1.0})
    assert run("show-config", "--config", config, "--out", tmp_path / "echo", "--write") == ExitStatus.SUCCESS
    assert (tmp_path / "echo" / "config_echo.json").exists()


def test_usage_error_exits_one():
    assert run("teleport") == ExitStatus.USAGE_ERROR
    assert run("evolve", "--threads", "many") == ExitStatus.USAGE_ERROR


def test_unexpected_handler_error_exits_four(tmp_path, monkeypatch):
    def broken(args, config, output_dir):
        raise RuntimeError("handler bug")

    monkeypatch.setattr(nhqsim, "handle_evolve", broken)
    config = write_config(tmp_path, {"n": 1, "omega": 1.0}, {"times": [0.0, 1.0]})
    assert run("evolve", "--config", config, "--out", tmp_path / "out") == ExitStatus.INTERNAL_ERROR


def test_numerical_failure_exits_two(tmp_path, monkeypatch):
    def diverging(args, config, output_dir):
        raise NumericalFailure("propagator overflowed")

    monkeypatch.setattr(nhqsim, "handle_evolve", diverging)
    config = write_config(tmp_path, {"n": 1, "omega": 1.0}, {"times": [0.0, 1.0]})
    assert run("evolve", "--config", config, "--out", tmp_path / "out") == ExitStatus.NUMERICAL_FAILURE
