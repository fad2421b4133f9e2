"""Sweeps, diagnostics and trajectories driven by a :class:`RunConfig`, with CSV/JSON export."""

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DetbalError, DomainError
from .pauli import build_generator, evolve, gibbs_state, stationary_state
from .scattering import hermiticity_defect, symmetry_defect, time_reversal_defect
from .thermal_rates import ThermalBath, dbe_identity_check, rate_matrix
from .thermo import entropy_decomposition, entropy_production, thermalization_residuals

SWEEP_COLUMNS = ("beta_deltaE", "I_0m", "I_pm", "I_0p", "lhs_30a", "rhs_30a", "lhs_30b",
                 "rhs_30b", "stat_residual", "quad_err_max", "status")
RATE_COLUMNS = ("beta_deltaE", "out", "in", "A", "B", "a", "I", "I_minus_one", "err_I")
MINUS, ZERO, PLUS = 0, 1, 2


def fmt_value(x):
    """17 significant digits for floats; ints and strings unchanged."""
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def write_table(path, columns, rows, fmt="csv"):
    """Write rows (dicts) as CSV with LF endings or as JSON; returns the path written."""
    path = os.fspath(path)
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    if fmt == "json":
        payload = {"columns": list(columns),
                   "rows": [[_json_value(r[c]) for c in columns] for r in rows]}
        text = json.dumps(payload, indent=1, sort_keys=True) + "\n"
    else:
        lines = [",".join(columns)]
        lines += [",".join(fmt_value(r[c]) for c in columns) for r in rows]
        text = "\n".join(lines) + "\n"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def _json_value(x):
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if np.isfinite(x) else fmt_value(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


def _bath(config, beta):
    return ThermalBath(beta, config.nu, config.rate_prefactor)


def _table(config, beta):
    model = config.model
    return rate_matrix(_bath(config, beta), model.channels(), model.coupling(), config.rtol)


def sweep_row(config, bde):
    """One row of the detailed-balance sweep; numerical failures end up in ``status``."""
    row = dict.fromkeys(SWEEP_COLUMNS, float("nan"))
    row["beta_deltaE"] = float(bde)
    try:
        beta = bde / config.delta_e
        table = _table(config, beta)
        row["I_0m"] = table.ratio(ZERO, MINUS)
        row["I_pm"] = table.ratio(PLUS, MINUS)
        row["I_0p"] = table.ratio(ZERO, PLUS)
        first, second = thermalization_residuals(table)
        row["lhs_30a"], row["rhs_30a"] = first.lhs, first.rhs
        row["lhs_30b"], row["rhs_30b"] = second.lhs, second.rhs
        gen = build_generator(table)
        row["stat_residual"] = gen.residual(gibbs_state(beta, table.energies))
        row["quad_err_max"] = table.quad_err_max
        row["status"] = "ok"
    except DetbalError as exc:
        row["status"] = f"error: {type(exc).__name__}: {exc}".replace(",", ";").replace("\n", " ")
        table = None
    return row, table


@dataclass
class SweepResult:
    rows: list
    tables: list = field(default_factory=list, repr=False)
    columns: tuple = SWEEP_COLUMNS

    @property
    def failed(self):
        return [r for r in self.rows if r["status"] != "ok"]

    def column(self, name):
        return np.array([r[name] for r in self.rows], dtype=float)


def _map(fn, args, jobs):
    if jobs and jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, *zip(*args)))
    return [fn(*a) for a in args]


def run_dbe_sweep(config, jobs=1, out_dir=None, fmt=None):
    """Ratios, thermalization conditions and stationarity over the configured temperatures.

    Rows come back (and are written) in ascending ``beta_deltaE`` whatever ``jobs`` is.
    """
    grid = sorted(config.beta_delta_e)
    results = _map(sweep_row, [(config, b) for b in grid], jobs)
    res = SweepResult([r for r, _ in results], [t for _, t in results])
    if out_dir is not None:
        fmt = fmt or config.fmt
        write_table(os.path.join(out_dir, f"sweep.{fmt}"), SWEEP_COLUMNS, res.rows, fmt)
    return res


def run_rates(config, jobs=1, out_dir=None, fmt=None):
    """Full rate tables, one row per (temperature, ordered pair)."""
    grid = sorted(config.beta_delta_e)
    tables = _map(_table, [(config, b / config.delta_e) for b in grid], jobs)
    labels = config.model.channels().labels
    rows = []
    for bde, t in zip(grid, tables):
        for k in range(t.n):
            for l in range(t.n):
                if k != l:
                    rows.append({"beta_deltaE": float(bde), "out": labels[k], "in": labels[l],
                                 "A": t.A[k, l], "B": t.B[k, l], "a": t.a[k, l], "I": t.I[k, l],
                                 "I_minus_one": t.I_minus_one[k, l], "err_I": t.err_I[k, l]})
    if out_dir is not None:
        fmt = fmt or config.fmt
        write_table(os.path.join(out_dir, f"rates.{fmt}"), RATE_COLUMNS, rows, fmt)
    return tables, rows


def default_energy_grid(channels, num=25):
    """Energies where every channel is open, from just above the top threshold."""
    top, spread = max(channels.energies), channels.energy_scale
    return tuple(float(x) for x in np.linspace(top + 0.05 * spread, top + 5.0 * spread, num))


def run_check(config, jobs=1, out_dir=None, fmt=None):
    """Defects of the T matrix, rate identities, stationarity and entropy closure."""
    model = config.model
    ch, v = model.channels(), model.coupling()
    grid = np.array(config.energy_grid or default_energy_grid(ch))
    report = {"defects": {}, "temperatures": []}
    for k in range(ch.n):
        for l in range(k + 1, ch.n):
            key = f"{ch.labels[k]},{ch.labels[l]}"
            report["defects"][key] = {
                "hermiticity": float(np.abs(hermiticity_defect(grid, k, l, v, ch)).max()),
                "symmetry": float(np.abs(symmetry_defect(grid, k, l, v, ch)).max()),
                "time_reversal": float(np.abs(time_reversal_defect(grid, k, l, v, ch)).max()),
            }
    grid_b = sorted(config.beta_delta_e)
    tables = _map(_table, [(config, b / config.delta_e) for b in grid_b], jobs)
    rng = np.random.default_rng(0)
    for bde, t in zip(grid_b, tables):
        ident = dbe_identity_check(t)
        off = ~np.eye(t.n, dtype=bool)
        recip = np.abs(t.I * t.I.T - 1.0)[off].max()
        boltz = np.exp(-t.beta * (t.energies[:, None] - t.energies[None, :]))
        relabel = 0.0
        if np.all(t.A[off] > 0):
            relabel = np.abs(t.B[off] / (boltz * t.A.T)[off] - 1.0).max()
        gen = build_generator(t)
        q = gibbs_state(t.beta, t.energies)
        p = rng.dirichlet(np.ones(t.n))
        ent = entropy_decomposition(p, t, q)
        entry = {
            "beta_deltaE": float(bde),
            "identity_residual_max": ident.max_residual,
            "identity_table_empty": ident.empty,
            "reciprocal_residual_max": float(recip),
            "relabel_residual_max": float(relabel),
            "stat_residual": gen.residual(q),
            "entropy_sigma": ent.sigma,
            "entropy_closure": ent.closure,
            "sigma_at_equilibrium": entropy_production(q, gen, q),
            "quad_err_max": t.quad_err_max,
        }
        try:
            entry["stationary_trace_distance"] = stationary_state(gen).trace_distance(q)
        except DetbalError as exc:
            entry["stationary_trace_distance"] = f"error: {exc}"
        report["temperatures"].append(entry)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, "check.json")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(json.dumps(_jsonable(report), indent=1, sort_keys=True) + "\n")
    return report


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return _json_value(obj)


def run_evolve(config, p0=None, t_grid=None, out_dir=None, fmt=None):
    """Relaxation from ``p0`` at ``evolve.beta_delta_e``, with entropy production per checkpoint.

    By default the checkpoints span ``[0, t_scaled / max|W|]`` in ``steps`` steps.
    """
    beta = config.evolve_beta_delta_e / config.delta_e
    table = _table(config, beta)
    gen = build_generator(table)
    q = gibbs_state(beta, table.energies)
    p0 = np.array(config.p0 if p0 is None else p0, dtype=float)
    if t_grid is None:
        t_end = config.t_scaled / gen.scale if gen.scale > 0 else 0.0
        t_grid = np.linspace(0.0, t_end, config.steps + 1)
    traj = evolve(p0, gen, np.asarray(t_grid, dtype=float))
    labels = config.model.channels().labels
    columns = ("time",) + tuple(f"p_{x}" for x in labels) + ("sigma", "trace_distance")
    rows = []
    for t, p in zip(traj.times, traj.populations):
        try:
            sigma = entropy_production(p, gen, q)
        except DomainError:
            sigma = float("inf")  # flow into an empty level: the log diverges upward
        row = {"time": float(t), "sigma": sigma,
               "trace_distance": 0.5 * float(np.abs(p - q.p).sum())}
        row.update({f"p_{x}": float(p[i]) for i, x in enumerate(labels)})
        rows.append(row)
    sigmas = np.array([r["sigma"] for r in rows])
    summary = {"sigma_nonnegative": bool(np.all(sigmas >= -1e-10)),
               "clamped": traj.clamped, "final_trace_distance": rows[-1]["trace_distance"]}
    if out_dir is not None:
        fmt = fmt or config.fmt
        write_table(os.path.join(out_dir, f"evolve.{fmt}"), columns, rows, fmt)
    return traj, rows, summary
