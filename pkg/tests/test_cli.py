"""Command-line interface: exit codes, file formats, determinism."""

import json
import os

import numpy as np
import pytest

from volflow.cli import main


def _write_config(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def _zero_config(tmp_path, **overrides):
    payload = {
        "system": {"name": "zero", "params": {"n": 2}},
        "dt": 0.1,
        "steps": 10,
        "sample_every": 2,
        "x0": [1.0, 2.0, 3.0, 4.0],
        "outputs": {
            "trajectory": str(tmp_path / "traj.csv"),
            "diagnostics": str(tmp_path / "diag.json"),
        },
    }
    payload.update(overrides)
    return _write_config(tmp_path, "config.json", payload)


# -------------------------------------------------------------------- simulate


def test_simulate_zero_system_rows(tmp_path):
    cfg = _zero_config(tmp_path)
    assert main(["simulate", "--config", cfg]) == 0
    lines = (tmp_path / "traj.csv").read_text().strip().split("\n")
    assert lines[0] == "t,q1,q2,p1,p2"
    assert len(lines) - 1 == 10 // 2 + 1
    # the zero field never moves: every state row identical
    states = {line.split(",", 1)[1] for line in lines[1:]}
    assert states == {"1,2,3,4"}
    diag = json.loads((tmp_path / "diag.json").read_text())
    assert diag["failed"] is False
    assert diag["rows_written"] == 6
    assert diag["symplectic"] is True


def test_simulate_byte_identical_reruns(tmp_path):
    cfg = _zero_config(tmp_path)
    main(["simulate", "--config", cfg])
    first_csv = (tmp_path / "traj.csv").read_bytes()
    first_diag = (tmp_path / "diag.json").read_bytes()
    main(["simulate", "--config", cfg])
    assert (tmp_path / "traj.csv").read_bytes() == first_csv
    assert (tmp_path / "diag.json").read_bytes() == first_diag


def test_simulate_flag_overrides(tmp_path):
    cfg = _zero_config(tmp_path)
    out = str(tmp_path / "other.csv")
    assert main(["simulate", "--config", cfg, "--steps", "4", "--dt", "0.5",
                 "--out", out]) == 0
    lines = open(out).read().strip().split("\n")
    assert len(lines) - 1 == 4 // 2 + 1
    assert lines[-1].split(",")[0] == "2"  # 4 steps of 0.5


def test_simulate_coupled_diagnostics(tmp_path):
    cfg = _write_config(tmp_path, "coupled.json", {
        "system": {"name": "coupled-oscillators"},
        "dt": 1e-2,
        "steps": 200,
        "outputs": {
            "trajectory": str(tmp_path / "c.csv"),
            "diagnostics": str(tmp_path / "c.json"),
        },
    })
    assert main(["simulate", "--config", cfg]) == 0
    diag = json.loads((tmp_path / "c.json").read_text())
    assert diag["system"] == "coupled-oscillators"
    assert diag["volume_det_max_abs_err"] < 1e-6
    assert diag["dets_positive"] is True
    assert diag["divergence_max_abs"] < 1e-5
    # volume-preserving but not symplectic
    assert diag["symplectic"] is False
    assert diag["lie_omega_max_abs"] > 0.4
    assert diag["energy_drift"] > 1e-4


def test_simulate_random_alpha_seed_env(tmp_path, monkeypatch):
    payload = {
        "system": {"name": "random-alpha", "params": {"n": 2}},
        "dt": 1e-2,
        "steps": 20,
        "outputs": {
            "trajectory": str(tmp_path / "r.csv"),
            "diagnostics": str(tmp_path / "r.json"),
        },
    }
    cfg = _write_config(tmp_path, "rand.json", payload)
    monkeypatch.setenv("VOLFLOW_SEED", "11")
    assert main(["simulate", "--config", cfg]) == 0
    first = (tmp_path / "r.csv").read_bytes()
    assert main(["simulate", "--config", cfg]) == 0
    assert (tmp_path / "r.csv").read_bytes() == first
    monkeypatch.setenv("VOLFLOW_SEED", "12")
    assert main(["simulate", "--config", cfg]) == 0
    assert (tmp_path / "r.csv").read_bytes() != first


def test_simulate_blowup_fails_with_partial_csv(tmp_path):
    cfg = _write_config(tmp_path, "blow.json", {
        "system": {"name": "random-alpha", "params": {"n": 3, "seed": 9, "scale": 1.0}},
        "dt": 1.0,
        "steps": 40,
        "sample_every": 4,
        "x0": [0.5] * 6,
        "outputs": {
            "trajectory": str(tmp_path / "b.csv"),
            "diagnostics": str(tmp_path / "b.json"),
        },
    })
    assert main(["simulate", "--config", cfg]) == 1
    diag = json.loads((tmp_path / "b.json").read_text())
    assert diag["failed"] is True
    assert "last_valid_time" in diag
    lines = (tmp_path / "b.csv").read_text().strip().split("\n")
    assert lines[0] == "t,q1,q2,q3,p1,p2,p3"
    assert 1 <= len(lines) - 1 < 41


def test_simulate_usage_errors(tmp_path, capsys):
    assert main(["simulate", "--config", str(tmp_path / "missing.json")]) == 2
    bad = _zero_config(tmp_path, dt=-1.0)
    assert main(["simulate", "--config", bad]) == 2
    short_x0 = _zero_config(tmp_path, x0=[1.0, 2.0])
    assert main(["simulate", "--config", short_x0]) == 2
    unknown = _write_config(tmp_path, "u.json", {
        "system": {"name": "not-a-system"}, "dt": 0.1, "steps": 2})
    assert main(["simulate", "--config", unknown]) == 2
    mismatch = _zero_config(tmp_path, n=3)
    assert main(["simulate", "--config", mismatch]) == 2
    capsys.readouterr()


def test_simulate_rejects_malformed_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert main(["simulate", "--config", str(path)]) == 2


# ----------------------------------------------------------------------- check


def test_check_report_structure_and_determinism(tmp_path, capsys):
    report = str(tmp_path / "rep.json")
    rc = main(["check", "--n", "2", "--trials", "4", "--seed", "3",
               "--horizon", "0.5", "--report", report])
    assert rc == 0
    out = capsys.readouterr().out
    assert "pass" in out and "oracle_equivalence" in out
    data = json.loads(open(report).read())
    assert data["_meta"]["n"] == [2]
    assert data["_meta"]["trials"] == 4
    for name, entry in data.items():
        if name == "_meta":
            continue
        assert set(entry) >= {"max_residual", "tolerance", "pass"}
        assert entry["pass"] is True
    first = open(report, "rb").read()
    main(["check", "--n", "2", "--trials", "4", "--seed", "3",
          "--horizon", "0.5", "--report", report])
    assert open(report, "rb").read() == first


def test_check_zero_trials_empty_report(tmp_path):
    report = str(tmp_path / "empty.json")
    assert main(["check", "--trials", "0", "--report", report]) == 0
    data = json.loads(open(report).read())
    assert [k for k in data if k != "_meta"] == []


def test_check_usage_errors(capsys):
    assert main(["check", "--n", "9"]) == 2
    assert main(["check", "--n", "abc"]) == 2
    assert main(["check", "--trials", "-1"]) == 2
    assert main(["check", "--horizon", "-2"]) == 2
    capsys.readouterr()


def test_check_seed_env_fallback(tmp_path, monkeypatch, capsys):
    r1 = str(tmp_path / "r1.json")
    r2 = str(tmp_path / "r2.json")
    monkeypatch.setenv("VOLFLOW_SEED", "99")
    main(["check", "--n", "2", "--trials", "3", "--horizon", "0.5", "--report", r1])
    monkeypatch.delenv("VOLFLOW_SEED")
    main(["check", "--n", "2", "--trials", "3", "--seed", "99",
          "--horizon", "0.5", "--report", r2])
    assert json.loads(open(r1).read()) == json.loads(open(r2).read())
    capsys.readouterr()


# ---------------------------------------------------------------------- oracle


def test_oracle_named_alphas(capsys):
    assert main(["oracle", "--alpha", "zero", "--point", "0.1,0.2,0.3,0.4"]) == 0
    out = capsys.readouterr().out
    assert "max residual" in out

    assert main(["oracle", "--alpha", "unit-a12", "--point", "1,0,0,0"]) == 0
    out = capsys.readouterr().out
    assert "pdot2" in out

    assert main(["oracle", "--alpha", "hamiltonian-p1", "--point", "0,0,0.5,0"]) == 0
    out = capsys.readouterr().out
    assert "qdot1" in out


def test_oracle_component_values(capsys):
    main(["oracle", "--alpha", "unit-a12", "--point", "0.3,-0.2,0.7,0.1"])
    out = capsys.readouterr().out
    rows = [line for line in out.splitlines() if line.strip().startswith(("q", "p"))]
    assert len(rows) == 4
    # field is exactly d/dp_2 regardless of the point
    vals = [float(r.split()[1]) for r in rows]
    assert vals == pytest.approx([0.0, 0.0, 0.0, 1.0], abs=1e-12)


def test_oracle_random_alpha_seeded(capsys, monkeypatch):
    monkeypatch.setenv("VOLFLOW_SEED", "4")
    assert main(["oracle", "--alpha", "random", "--point", "0.1,0.1,0.1,0.1,0.1,0.1"]) == 0
    first = capsys.readouterr().out
    assert main(["oracle", "--alpha", "random", "--point", "0.1,0.1,0.1,0.1,0.1,0.1"]) == 0
    assert capsys.readouterr().out == first


def test_oracle_usage_errors(capsys):
    assert main(["oracle", "--alpha", "zero", "--point", "1,2,3"]) == 2
    assert main(["oracle", "--alpha", "nope", "--point", "1,2,3,4"]) == 2
    assert main(["oracle", "--alpha", "coupled", "--point", "1,2,3,4,5,6"]) == 2
    assert main(["oracle", "--alpha", "zero", "--point", "a,b,c,d"]) == 2
    assert main(["oracle", "--alpha", "zero", "--point", "1,2,3,4", "--n", "3"]) == 2
    capsys.readouterr()


# ------------------------------------------------------------------- top level


def test_no_subcommand_is_usage_error(capsys):
    assert main([]) == 2
    capsys.readouterr()


def test_unknown_flag_is_usage_error(capsys):
    assert main(["simulate", "--nope"]) == 2
    capsys.readouterr()
