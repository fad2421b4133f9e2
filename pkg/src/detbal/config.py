"""YAML run configuration.

Schema (every key except ``model.site_strengths`` and one temperature source is
optional)::

    model:
      energies: [-0.5, 0.0, 0.5]      # ordered (-, 0, +); or give tau and phi
      tau: null
      phi: null
      site_strengths: [1.0, 0.7, 1.5]
      mass: 1.0
      hbar: 1.0
    bath:
      beta_delta_e: [0.1, 1.0, 10.0]  # beta times the level spread, or
      sweep: {start: 0.1, stop: 10.0, num: 50, spacing: log}
      betas: [...]                    # raw inverse temperatures
      nu: 1.0
      rate_prefactor: 1.0
    quadrature:
      rtol: 1.0e-9
    check:
      energy_grid: {start: 0.6, stop: 3.0, num: 25}
    evolve:
      beta_delta_e: 1.0
      p0: [1.0, 0.0, 0.0]
      t_scaled: 50.0                  # final time times max|W|
      steps: 50
    output:
      dir: out
      format: csv
    reports: [dbe]
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np
import yaml

from .errors import ParseError, ValidationError
from .model_3qd import TriangleModel

REPORTS = ("dbe", "rates", "evolve", "thermo", "check")
FORMATS = ("csv", "json")

_SECTIONS = {
    "model": {"energies", "tau", "phi", "site_strengths", "mass", "hbar"},
    "bath": {"beta_delta_e", "sweep", "betas", "nu", "rate_prefactor"},
    "quadrature": {"rtol"},
    "check": {"energy_grid"},
    "evolve": {"beta_delta_e", "p0", "t_scaled", "steps"},
    "output": {"dir", "format"},
    "reports": None,
}


@dataclass(frozen=True)
class RunConfig:
    model: TriangleModel
    beta_delta_e: tuple
    nu: float = 1.0
    rate_prefactor: float = 1.0
    rtol: float = 1e-9
    energy_grid: tuple = None
    evolve_beta_delta_e: float = 1.0
    p0: tuple = (1.0, 0.0, 0.0)
    t_scaled: float = 50.0
    steps: int = 50
    out_dir: str = "out"
    fmt: str = "csv"
    reports: tuple = ("dbe",)
    source: str = field(default=None, compare=False)

    @property
    def delta_e(self):
        return max(self.model.energies) - min(self.model.energies)

    def betas(self):
        return tuple(x / self.delta_e for x in self.beta_delta_e)

    def with_overrides(self, **kw):
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def _number(value, where, problems, positive=False, allow_zero=False):
    if isinstance(value, bool):
        problems.append(f"{where}: expected a number, got {value!r}")
        return None
    try:
        x = float(value)  # YAML 1.1 reads 1e-9 as a string
    except (TypeError, ValueError):
        problems.append(f"{where}: expected a number, got {value!r}")
        return None
    if not math.isfinite(x):
        problems.append(f"{where}: must be finite, got {value!r}")
        return None
    if positive and not (x > 0 or (allow_zero and x == 0)):
        problems.append(f"{where}: must be {'nonnegative' if allow_zero else 'positive'}, got {x!r}")
        return None
    return x


def _numbers(value, where, problems, length=None, positive=False):
    if not isinstance(value, (list, tuple)):
        problems.append(f"{where}: expected a list, got {value!r}")
        return None
    if length is not None and len(value) != length:
        problems.append(f"{where}: expected {length} entries, got {len(value)}")
        return None
    if not value:
        problems.append(f"{where}: must not be empty")
        return None
    out = [_number(v, f"{where}[{i}]", problems, positive) for i, v in enumerate(value)]
    return None if any(x is None for x in out) else tuple(out)


def _grid(spec, where, problems):
    if not isinstance(spec, dict):
        problems.append(f"{where}: expected a mapping with start/stop/num")
        return None
    extra = set(spec) - {"start", "stop", "num", "spacing"}
    if extra:
        problems.append(f"{where}: unknown keys {sorted(extra)}")
    start = _number(spec.get("start"), f"{where}.start", problems)
    stop = _number(spec.get("stop"), f"{where}.stop", problems)
    num = spec.get("num")
    if not isinstance(num, int) or isinstance(num, bool) or num < 1:
        problems.append(f"{where}.num: expected a positive integer, got {num!r}")
        return None
    spacing = spec.get("spacing", "linear")
    if spacing not in ("linear", "log"):
        problems.append(f"{where}.spacing: expected 'linear' or 'log', got {spacing!r}")
        return None
    if start is None or stop is None:
        return None
    if spacing == "log":
        if start <= 0 or stop <= 0:
            problems.append(f"{where}: log spacing needs positive start and stop")
            return None
        return tuple(float(x) for x in np.geomspace(start, stop, num))
    return tuple(float(x) for x in np.linspace(start, stop, num))


def parse_config(data, source=None):
    """Validate an already-parsed mapping; collects every violation before raising."""
    problems = []
    if not isinstance(data, dict):
        raise ValidationError(["top level: expected a mapping"])
    for key in sorted(set(data) - set(_SECTIONS)):
        problems.append(f"{key}: unknown section")
    sections = {}
    for name, keys in _SECTIONS.items():
        sec = data.get(name, {} if keys is not None else None)
        if keys is not None:
            if sec is None:
                sec = {}
            if not isinstance(sec, dict):
                problems.append(f"{name}: expected a mapping")
                sec = {}
            for key in sorted(set(sec) - keys):
                problems.append(f"{name}.{key}: unknown key")
        sections[name] = sec

    m = sections["model"]
    strengths = None
    if "site_strengths" not in m:
        problems.append("model.site_strengths: required")
    else:
        strengths = _numbers(m["site_strengths"], "model.site_strengths", problems, length=3)
    mass = _number(m.get("mass", 1.0), "model.mass", problems, positive=True)
    hbar = _number(m.get("hbar", 1.0), "model.hbar", problems, positive=True)
    energies = tau = phi = None
    if m.get("energies") is not None:
        energies = _numbers(m["energies"], "model.energies", problems, length=3)
        if energies is not None and len(set(energies)) != 3:
            problems.append("model.energies: levels must be pairwise distinct")
            energies = None
    elif m.get("tau") is not None and m.get("phi") is not None:
        tau = _number(m["tau"], "model.tau", problems)
        phi = _number(m["phi"], "model.phi", problems)
        if tau == 0:
            problems.append("model.tau: must be nonzero")
    else:
        problems.append("model: give either energies or both tau and phi")

    b = sections["bath"]
    sources = [k for k in ("beta_delta_e", "sweep", "betas") if k in b]
    bde = None
    if len(sources) != 1:
        problems.append("bath: give exactly one of beta_delta_e, sweep, betas")
    elif sources[0] == "sweep":
        bde = _grid(b["sweep"], "bath.sweep", problems)
    else:
        bde = _numbers(b[sources[0]], f"bath.{sources[0]}", problems, positive=True)
    if bde is not None and not all(x > 0 and math.isfinite(x) for x in bde):
        problems.append("bath: every inverse temperature must be positive and finite")
    nu = _number(b.get("nu", 1.0), "bath.nu", problems, positive=True)
    pref = _number(b.get("rate_prefactor", 1.0), "bath.rate_prefactor", problems, positive=True)

    rtol = _number(sections["quadrature"].get("rtol", 1e-9), "quadrature.rtol", problems,
                   positive=True)
    if rtol is not None and not rtol < 1:
        problems.append("quadrature.rtol: must be below 1")

    grid = None
    if "energy_grid" in sections["check"]:
        grid = _grid(sections["check"]["energy_grid"], "check.energy_grid", problems)

    ev = sections["evolve"]
    ev_bde = _number(ev.get("beta_delta_e", 1.0), "evolve.beta_delta_e", problems, positive=True)
    p0 = _numbers(ev.get("p0", [1.0, 0.0, 0.0]), "evolve.p0", problems, length=3)
    if p0 is not None and (min(p0) < 0 or abs(sum(p0) - 1.0) > 1e-12):
        problems.append("evolve.p0: must be nonnegative and sum to 1")
    t_scaled = _number(ev.get("t_scaled", 50.0), "evolve.t_scaled", problems, positive=True,
                       allow_zero=True)
    steps = ev.get("steps", 50)
    if not isinstance(steps, int) or isinstance(steps, bool) or steps < 1:
        problems.append(f"evolve.steps: expected a positive integer, got {steps!r}")

    out = sections["output"]
    fmt = out.get("format", "csv")
    if fmt not in FORMATS:
        problems.append(f"output.format: expected one of {FORMATS}, got {fmt!r}")
    out_dir = out.get("dir", "out")
    if not isinstance(out_dir, str):
        problems.append("output.dir: expected a string")

    reports = sections["reports"]
    reports = ["dbe"] if reports is None else reports
    if isinstance(reports, str):
        reports = [reports]
    if not isinstance(reports, list) or not reports:
        problems.append("reports: at least one report is required")
        reports = []
    for r in reports:
        if r not in REPORTS:
            problems.append(f"reports: unknown report {r!r} (choose from {REPORTS})")

    model = None
    if not problems:
        try:
            model = TriangleModel(strengths, tau=tau, phi=phi, energies=energies,
                                  mass=mass, hbar=hbar)
        except ValueError as exc:
            problems.append(f"model: {exc}")
    if problems:
        raise ValidationError(problems)
    return RunConfig(model, tuple(bde), nu, pref, rtol, grid, ev_bde, tuple(p0), t_scaled,
                     steps, out_dir, fmt, tuple(reports), source)


def load_config(path):
    """Read and validate a YAML config file."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    return loads_config(text, source=str(path))


def loads_config(text, source=None):
    try:
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line = mark.line + 1 if mark else None
        col = mark.column + 1 if mark else None
        raise ParseError(f"{source or '<config>'}: {exc.problem}", line, col) from exc
    except yaml.YAMLError as exc:
        raise ParseError(f"{source or '<config>'}: {exc}") from exc
    if data is None:
        data = {}
    return parse_config(data, source)
