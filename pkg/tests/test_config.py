from pathlib import Path

import numpy as np
import pytest

from detbal.config import load_config, loads_config
from detbal.errors import ParseError, ValidationError

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

MINIMAL = """
model:
  energies: [-0.5, 0.0, 0.5]
  site_strengths: [1.0, 0.7, 1.5]
bath:
  beta_delta_e: [0.5, 1.0, 2.0]
"""


def test_minimal_config_gets_defaults():
    cfg = loads_config(MINIMAL)
    assert cfg.model.site_strengths == (1.0, 0.7, 1.5)
    assert cfg.model.mass == 1.0 and cfg.model.hbar == 1.0
    assert cfg.nu == 1.0 and cfg.rate_prefactor == 1.0 and cfg.rtol == 1e-9
    assert cfg.reports == ("dbe",) and cfg.fmt == "csv"
    assert cfg.betas() == (0.5, 1.0, 2.0)


def test_repo_configs_load():
    for name in ("asymmetric", "symmetric"):
        cfg = load_config(CONFIGS / f"{name}.yaml")
        assert len(cfg.beta_delta_e) == 50
        assert cfg.beta_delta_e[0] == pytest.approx(0.1) and cfg.beta_delta_e[-1] == 10.0


def test_tau_phi_model_and_string_exponents():
    cfg = loads_config("""
model: {tau: 0.3, phi: 0.2, site_strengths: [1, 2, 3]}
bath: {betas: [1e-1, 2]}
quadrature: {rtol: 1e-10}
""")
    assert cfg.rtol == 1e-10
    assert abs(sum(cfg.model.energies)) < 1e-12
    assert cfg.beta_delta_e == (0.1, 2.0)


def test_missing_strengths_named():
    with pytest.raises(ValidationError) as info:
        loads_config("model: {energies: [-0.5, 0, 0.5]}\nbath: {beta_delta_e: [1]}\n")
    assert any("site_strengths" in v for v in info.value.violations)


def test_negative_beta_rejected():
    with pytest.raises(ValidationError) as info:
        loads_config(MINIMAL.replace("[0.5, 1.0, 2.0]", "[0.5, -1.0]"))
    assert any("bath.beta_delta_e[1]" in v for v in info.value.violations)


def test_all_violations_listed():
    text = """
model:
  energies: [0, 0, 1]
  site_strengths: [1, 2]
  colour: red
bath:
  sweep: {start: 0.1, stop: 10, num: 0}
output: {format: xml}
reports: [dbe, plot]
"""
    with pytest.raises(ValidationError) as info:
        loads_config(text)
    joined = "\n".join(info.value.violations)
    for key in ("model.energies", "model.site_strengths", "model.colour", "bath.sweep.num",
                "output.format", "plot"):
        assert key in joined
    assert len(info.value.violations) >= 6


def test_parse_error_has_position(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("model:\n  energies: [1, 2\nbath: {}\n")
    with pytest.raises(ParseError) as info:
        load_config(path)
    assert info.value.line is not None and info.value.column is not None


def test_missing_file_is_parse_error(tmp_path):
    with pytest.raises(ParseError):
        load_config(tmp_path / "nope.yaml")


def test_degenerate_flux_rejected():
    with pytest.raises(ValidationError):
        loads_config("model: {tau: 0.5, phi: 0, site_strengths: [1, 1, 2]}\nbath: {betas: [1]}")


def test_log_sweep_grid():
    cfg = loads_config(MINIMAL.replace("beta_delta_e: [0.5, 1.0, 2.0]",
                                       "sweep: {start: 1, stop: 100, num: 3, spacing: log}"))
    assert np.allclose(cfg.beta_delta_e, (1, 10, 100))
