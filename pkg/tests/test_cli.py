import csv
import json

import numpy as np
import pytest

from detbal.cli import main
from detbal.config import loads_config
from detbal.pauli import gibbs_state
from detbal.runner import SWEEP_COLUMNS, run_dbe_sweep, run_evolve

CONFIG = """
model:
  energies: [-0.5, 0.0, 0.5]
  site_strengths: [1.0, 0.7, 1.5]
bath:
  beta_delta_e: [0.3, 1.0, 4.0]
evolve:
  t_scaled: 50
  steps: 10
"""


@pytest.fixture
def cfg_path(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text(CONFIG)
    return path


def test_sweep_writes_exact_columns(cfg_path, tmp_path):
    out = tmp_path / "o"
    assert main(["sweep", "--config", str(cfg_path), "--out", str(out)]) == 0
    raw = (out / "sweep.csv").read_bytes()
    assert b"\r" not in raw
    rows = list(csv.DictReader(raw.decode().splitlines()))
    assert tuple(rows[0]) == SWEEP_COLUMNS
    assert [float(r["beta_deltaE"]) for r in rows] == [0.3, 1.0, 4.0]
    assert all(r["status"] == "ok" for r in rows)


def test_byte_identical_reruns_and_parallel(cfg_path, tmp_path):
    outs = [tmp_path / n for n in ("a", "b", "c")]
    main(["sweep", "--config", str(cfg_path), "--out", str(outs[0])])
    main(["sweep", "--config", str(cfg_path), "--out", str(outs[1])])
    main(["sweep", "--config", str(cfg_path), "--out", str(outs[2]), "--jobs", "2"])
    data = [(o / "sweep.csv").read_bytes() for o in outs]
    assert data[0] == data[1] == data[2]


def test_json_format_and_rates(cfg_path, tmp_path):
    out = tmp_path / "j"
    assert main(["rates", "--config", str(cfg_path), "--out", str(out), "--format", "json"]) == 0
    payload = json.loads((out / "rates.json").read_text())
    assert len(payload["rows"]) == 3 * 6
    assert payload["columns"][:3] == ["beta_deltaE", "out", "in"]


def test_check_and_evolve(cfg_path, tmp_path, capsys):
    out = tmp_path / "c"
    assert main(["check", "--config", str(cfg_path), "--out", str(out)]) == 0
    report = json.loads((out / "check.json").read_text())
    for entry in report["temperatures"]:
        assert entry["identity_residual_max"] <= 1e-6
        assert entry["stationary_trace_distance"] <= 1e-6
    for pair in report["defects"].values():
        assert min(pair.values()) > 0
    assert main(["evolve", "--config", str(cfg_path), "--out", str(out)]) == 0
    rows = list(csv.DictReader((out / "evolve.csv").read_text().splitlines()))
    assert len(rows) == 11
    assert all(float(r["sigma"]) >= -1e-10 for r in rows)
    assert float(rows[-1]["trace_distance"]) <= 1e-8
    assert "evolve:" in capsys.readouterr().out


def test_validation_error_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.yaml"
    path.write_text("model: {energies: [-0.5, 0, 0.5]}\nbath: {beta_delta_e: [-1]}\n")
    assert main(["sweep", "--config", str(path), "--out", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert "site_strengths" in err and "beta_delta_e" in err


def test_parse_error_and_bad_flags(cfg_path, tmp_path):
    path = tmp_path / "broken.yaml"
    path.write_text("model: [\n")
    assert main(["sweep", "--config", str(path)]) == 2
    assert main(["sweep", "--config", str(cfg_path), "--quad-tol", "2"]) == 2
    assert main(["sweep", "--config", str(cfg_path), "--jobs", "0"]) == 2


def test_numerical_failure_recorded_in_row(tmp_path):
    path = tmp_path / "cold.yaml"
    path.write_text(CONFIG.replace("[0.3, 1.0, 4.0]", "[1.0, 1.0e6]"))
    out = tmp_path / "cold"
    assert main(["sweep", "--config", str(path), "--out", str(out)]) == 3
    rows = list(csv.DictReader((out / "sweep.csv").read_text().splitlines()))
    assert rows[0]["status"] == "ok"
    assert rows[1]["status"].startswith("error: UndefinedRatio")
    assert rows[1]["I_0m"] == "nan"


def test_symmetric_config_is_balanced():
    cfg = loads_config(CONFIG.replace("1.5]", "0.7]"))
    res = run_dbe_sweep(cfg)
    for name in ("I_0m", "I_pm", "I_0p"):
        assert abs(res.column(name) - 1).max() <= 1e-7


def test_evolve_from_gibbs_is_constant():
    cfg = loads_config(CONFIG)
    q = gibbs_state(1.0 / cfg.delta_e, cfg.model.energies).p
    traj, rows, summary = run_evolve(cfg, p0=q)
    assert abs(traj.populations - q).max() <= 1e-10
    assert summary["sigma_nonnegative"]
    assert np.isfinite(rows[0]["sigma"])
