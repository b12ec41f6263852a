import csv
import json
import os
import subprocess
import sys

import numpy as np
import pytest

from sqzc.fock import load_state
from sqzc.scenario.cli import EXIT_CONFIG, EXIT_IO, EXIT_OK, EXIT_SOLVER, main

SMALL = {
    "name": "small",
    "circuit": {"kappa1": 50.0, "eps1_mag": 4.0, "g": 20.0, "delta_q": 200.0, "delta12": 2.0},
    "truncation": {"n1": 3, "n2": 6, "include_qubit": True},
    "solver": {"tier": "fock"},
}


def _write(tmp_path, doc, name="c.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def _error(capsys):
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


def test_vacuum_run(tmp_path, capsys):
    cfg = _write(tmp_path, {"name": "vac", "sweep": [{"variable": "eps1", "start": 0, "stop": 0, "points": 1}],
                            "output": {"formats": ["csv", "svg"]}})
    assert main(["run", "--config", cfg, "--out-dir", str(tmp_path / "o")]) == EXIT_OK
    with open(tmp_path / "o" / "vac.csv") as fh:
        row = next(csv.DictReader(fh))
    assert float(row["var_min"]) == 0.5
    assert (tmp_path / "o" / "vac.svg").exists()


def test_config_error_exit(tmp_path, capsys):
    cfg = _write(tmp_path, {"circuit": {"kapa1": 1}})
    assert main(["run", "--config", cfg]) == EXIT_CONFIG
    err = _error(capsys)
    assert err["error"] == "ConfigError" and err["exit_code"] == 2


def test_missing_file_exit(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "none.json")]) == EXIT_IO
    assert _error(capsys)["exit_code"] == 4


def test_solver_error_exit(tmp_path, capsys):
    cfg = _write(tmp_path, {"circuit": {"kappa1": 50.0, "g": 56.0, "delta_q": 600.0}})
    assert main(["gaussian", "optimum", "--config", cfg, "--eps1", "6", "--window", "10,12"]) == EXIT_SOLVER
    assert _error(capsys)["error"] == "NoBracketError"
    assert main(["gaussian", "optimum", "--config", cfg, "--window", "3"]) == EXIT_CONFIG


def test_failed_sweep_point_exit(tmp_path, capsys):
    doc = dict(SMALL, solver={"tier": "fock", "method": "direct"}, truncation={"n1": 10, "n2": 30},
               sweep=[{"variable": "eps1", "start": 1, "stop": 1, "points": 1}])
    assert main(["run", "--config", _write(tmp_path, doc), "--out-dir", str(tmp_path)]) == EXIT_SOLVER
    assert (tmp_path / "small.csv").exists()


def test_gaussian_optimum_output(tmp_path, capsys):
    cfg = _write(tmp_path, {"circuit": {"kappa1": 50.0, "g": 0.0}})
    assert main(["gaussian", "optimum", "--config", cfg, "--eps1", "10"]) == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert abs(out["delta12_opt"]) < 1e-4
    assert out["var_min_opt"] == pytest.approx(0.097586, abs=1e-5)


def test_fock_steady_and_wigner_round_trip(tmp_path, capsys):
    cfg = _write(tmp_path, SMALL)
    state = str(tmp_path / "rho.sqzc")
    assert main(["fock", "steady", "--config", cfg, "--state-out", state]) == EXIT_OK
    summary = json.loads(capsys.readouterr().out)
    rho, params = load_state(state)
    assert rho.dims == (3, 6, 2) and params.eps1_mag == 4.0
    assert summary["var_min"] < 0.5
    out = str(tmp_path / "w.csv")
    assert main(["fock", "wigner", "--state", state, "--xmax", "4", "--points", "41", "--out", out]) == EXIT_OK
    w = np.loadtxt(out, delimiter=",", skiprows=1)
    assert w.shape == (41 * 41, 3)
    assert w[:, 2].sum() * (8 / 40) ** 2 == pytest.approx(1.0, abs=0.02)
    assert main(["fock", "wigner", "--state", str(tmp_path / "missing"), "--out", out]) == EXIT_IO


def test_corrupt_state_exit(tmp_path, capsys):
    bad = tmp_path / "bad.sqzc"
    bad.write_bytes(b"nope")
    assert main(["fock", "wigner", "--state", str(bad), "--out", str(tmp_path / "w.csv")]) == EXIT_IO


def test_recipe_emit_config(tmp_path, capsys):
    path = tmp_path / "fig5.json"
    assert main(["recipe", "fig5", "--emit-config", str(path)]) == EXIT_OK
    doc = json.loads(path.read_text())
    assert doc["circuit"]["delta12"] == 4.95 and doc["task"] == "number_distribution"
    assert main(["recipe", "fig1"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["name"] == "fig1"


def test_threads_environment(tmp_path, monkeypatch, capsys):
    cfg = _write(tmp_path, {"name": "t", "sweep": [{"variable": "eps1", "start": 1, "stop": 3, "points": 3}]})
    monkeypatch.setenv("SQZC_THREADS", "2")
    assert main(["run", "--config", cfg, "--out-dir", str(tmp_path)]) == EXIT_OK
    monkeypatch.setenv("SQZC_THREADS", "zero")
    assert main(["run", "--config", cfg, "--out-dir", str(tmp_path)]) == EXIT_CONFIG
    monkeypatch.setenv("SQZC_THREADS", "0")
    assert main(["run", "--config", cfg, "--out-dir", str(tmp_path)]) == EXIT_CONFIG


def test_number_distribution_task(tmp_path, capsys):
    doc = dict(SMALL, task="number_distribution", name="pn")
    assert main(["run", "--config", _write(tmp_path, doc), "--out-dir", str(tmp_path)]) == EXIT_OK
    summary = json.loads((tmp_path / "pn_summary.json").read_text())
    assert list(summary) == ["base"]
    assert (tmp_path / "pn_base_pn.csv").exists()


def test_console_script_entry():
    env = dict(os.environ)
    proc = subprocess.run([sys.executable, "-m", "sqzc.scenario.cli", "recipe", "fig9"],
                          capture_output=True, text=True, env=env)
    assert proc.returncode == 2
