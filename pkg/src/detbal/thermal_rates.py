"""Thermal transition-rate integrals and the detailed-balance ratio I(k, l).

For an ordered pair (out, in) the forward integral is

    A(out, in) = 2m int dE exp(-beta (E - eps_in)) |T_out,in(E)|^2
                 / sqrt((E - eps_in)(E - eps_out)),

taken from the higher of the two thresholds; ``B`` is the same integral with
the reversed element ``|T_in,out(E)|^2`` and ``I = A / B``.  The difference
``D = A - B`` is integrated as a third component on the same nodes so that
``I - 1 = D / B`` keeps its relative accuracy when ``I`` is close to one.

The integrands carry square-root behaviour at every channel threshold.  The
energy axis is cut at each threshold above the lower limit and every segment is
mapped to ``E = anchor +/- u**2`` from its nearer threshold, which makes the
integrand analytic in ``u``.
"""

from dataclasses import dataclass, field

import numpy as np

from . import quadrature
from .errors import IncompleteTable, QuadratureFailure, UndefinedRatio
from .scattering import t_matrix

TAIL_EXPONENT = 40.0  # exp(-40) ~ 4e-18 relative to the integrand at the lower limit
UNDERFLOW = 1e-300
DIFF_FLOOR = 1e-5


@dataclass(frozen=True)
class ThermalBath:
    """Ideal 1D gas at inverse temperature ``beta`` and density ``nu``.

    ``rate_prefactor`` multiplies every rate; none of the detailed-balance
    diagnostics depend on it.
    """

    beta: float
    nu: float = 1.0
    rate_prefactor: float = 1.0

    def __post_init__(self):
        for name in ("beta", "nu", "rate_prefactor"):
            val = getattr(self, name)
            if not (np.isfinite(val) and val > 0):
                raise ValueError(f"{name} must be positive and finite, got {val!r}")

    @classmethod
    def from_density(cls, beta, nu, mass=1.0):
        """Bath whose prefactor is ``nu pi / Z`` with ``Z = sqrt(2 pi m / beta)``."""
        z = np.sqrt(2.0 * np.pi * mass / beta)
        return cls(beta, nu, nu * np.pi / z)


@dataclass
class PairIntegrals:
    """Forward, reverse and difference integrals for one ordered pair."""

    j_out: int
    j_in: int
    A: float
    B: float
    D: float
    err_A: float
    err_B: float
    err_D: float
    n_evals: int
    n_intervals: int
    truncation: float
    roundoff_limited: bool = False

    @property
    def ratio(self):
        if self.A < UNDERFLOW or self.B < UNDERFLOW:
            raise UndefinedRatio(
                f"I({self.j_out},{self.j_in}) undefined: A={self.A:.3e}, B={self.B:.3e}"
            )
        return 1.0 + self.D / self.B

    @property
    def ratio_minus_one(self):
        self.ratio  # raises when undefined
        return self.D / self.B

    @property
    def ratio_error(self):
        return self.err_D / self.B + abs(self.D) * self.err_B / self.B ** 2


def _pieces(e_low, e_max, eps):
    """Substitution pieces ``(anchor, sign, u_max, anchor_channel)`` covering [e_low, e_max]."""
    inner = sorted(e for e in eps if e_low < e < e_max)
    pts = [e_low] + inner
    chan = {e: int(np.flatnonzero(eps == e)[0]) for e in pts}
    pieces = []
    for a, c in zip(pts[:-1], pts[1:]):
        mid = 0.5 * (a + c)
        pieces.append((a, 1.0, np.sqrt(mid - a), chan[a]))
        pieces.append((c, -1.0, np.sqrt(c - mid), chan[c]))
    last = pts[-1]
    pieces.append((last, 1.0, np.sqrt(e_max - last), chan[last]))
    return pieces


def _pair_integrand(j_out, j_in, beta, channels, v, pieces):
    eps = channels.eps
    two_m = 2.0 * channels.mass
    anchors = np.array([p[0] for p in pieces])
    signs = np.array([p[1] for p in pieces])
    umax = np.array([p[2] for p in pieces])
    achan = np.array([p[3] for p in pieces])
    npieces = len(pieces)

    def f(t):
        k = np.clip(np.floor(t).astype(int), 0, npieces - 1)
        u = (t - k) * umax[k]
        usq = u * u
        energy = anchors[k] + signs[k] * usq
        offsets = energy[:, None] - eps[None, :]
        rows = np.arange(t.size)
        offsets[rows, achan[k]] = signs[k] * usq
        tm = t_matrix(energy, v, channels, offsets=offsets)
        fwd = np.abs(tm[:, j_out, j_in]) ** 2
        rev = np.abs(tm[:, j_in, j_out]) ** 2
        denom = np.sqrt(offsets[:, j_in]) * np.sqrt(offsets[:, j_out])
        w = two_m * np.exp(-beta * offsets[:, j_in]) * (2.0 * u * umax[k]) / denom
        return np.stack([w * fwd, w * rev, w * (fwd - rev)], axis=1)

    return f


def pair_integrals(j_out, j_in, bath, channels, v, rtol=1e-9):
    """A, B and A - B for one ordered pair, with error estimates."""
    j_out, j_in = channels.index(j_out), channels.index(j_in)
    if j_out == j_in:
        raise ValueError("elastic (diagonal) integrals are not defined")
    eps = channels.eps
    e_low = max(eps[j_out], eps[j_in])
    e_max = e_low + TAIL_EXPONENT / bath.beta
    pieces = _pieces(e_low, e_max, eps)
    f = _pair_integrand(j_out, j_in, bath.beta, channels, v, pieces)
    try:
        res = quadrature.integrate(f, 0.0, float(len(pieces)), rtol=rtol,
                                   floor_rel=DIFF_FLOOR, initial=len(pieces))
    except QuadratureFailure as exc:
        raise QuadratureFailure(
            f"pair ({channels.labels[j_out]},{channels.labels[j_in]}) at beta={bath.beta}: {exc}",
            exc.estimate, exc.error,
        ) from exc
    # exponential tail beyond e_max, bounded by integrand(e_max) / beta
    tail = f(np.array([len(pieces) - 1e-12]))[0, :2]
    de_dt = 2.0 * pieces[-1][2] ** 2
    truncation = float(np.max(np.abs(tail)) / de_dt / bath.beta)
    a, b, d = res.value
    ea, eb, ed = res.error
    return PairIntegrals(j_out, j_in, float(a), float(b), float(d),
                         float(ea + truncation), float(eb + truncation), float(ed + truncation),
                         res.n_evals, res.n_intervals, truncation, res.roundoff_limited)


def thermal_integral_A(j_out, j_in, bath, channels, v, rtol=1e-9):
    return pair_integrals(j_out, j_in, bath, channels, v, rtol).A


def thermal_integral_B(j_out, j_in, bath, channels, v, rtol=1e-9):
    return pair_integrals(j_out, j_in, bath, channels, v, rtol).B


def i_ratio(j_out, j_in, bath, channels, v, rtol=1e-9):
    """``I(out, in) = A / B``; raises :class:`UndefinedRatio` on underflow."""
    return pair_integrals(j_out, j_in, bath, channels, v, rtol).ratio


@dataclass
class RateTable:
    """Everything the population dynamics needs at one temperature.

    Matrices are indexed ``[k, l]`` = (out, in); ``a[k, l]`` is the rate of
    ``l -> k``.  Undefined ratios are stored as NaN and listed in ``missing``.
    """

    beta: float
    energies: np.ndarray
    A: np.ndarray
    B: np.ndarray
    D: np.ndarray
    a: np.ndarray
    I: np.ndarray
    I_minus_one: np.ndarray
    err_A: np.ndarray
    err_B: np.ndarray
    err_I: np.ndarray
    prefactor: float = 1.0
    labels: tuple = None
    report: dict = field(default_factory=dict)
    missing: list = field(default_factory=list)

    @property
    def n(self):
        return self.energies.size

    @property
    def quad_err_max(self):
        off = ~np.eye(self.n, dtype=bool)
        finite = np.isfinite(self.err_I[off])
        return float(self.err_I[off][finite].max(initial=0.0))

    def ratio(self, k, l):
        val = self.I[k, l]
        if not np.isfinite(val):
            raise UndefinedRatio(f"I({k},{l}) is undefined for this table")
        return val

    def check_complete(self):
        off = ~np.eye(self.n, dtype=bool)
        if not np.all(np.isfinite(self.a[off])):
            raise IncompleteTable("rate table has undefined off-diagonal rates")


def rate_matrix(bath, channels, v, rtol=1e-9):
    """All off-diagonal integrals, rates and ratios at ``bath.beta``."""
    n = channels.n
    shape = (n, n)
    A, B, D = np.zeros(shape), np.zeros(shape), np.zeros(shape)
    eA, eB = np.zeros(shape), np.zeros(shape)
    I = np.ones(shape)
    Im1 = np.zeros(shape)
    eI = np.zeros(shape)
    missing = []
    report = {"n_evals": {}, "n_intervals": {}, "truncation": {}, "roundoff_limited": []}
    for k in range(n):
        for l in range(n):
            if k == l:
                continue
            p = pair_integrals(k, l, bath, channels, v, rtol)
            A[k, l], B[k, l], D[k, l] = p.A, p.B, p.D
            eA[k, l], eB[k, l] = p.err_A, p.err_B
            key = f"{channels.labels[k]},{channels.labels[l]}"
            report["n_evals"][key] = p.n_evals
            report["n_intervals"][key] = p.n_intervals
            report["truncation"][key] = p.truncation
            if p.roundoff_limited:
                report["roundoff_limited"].append(key)
            try:
                Im1[k, l] = p.ratio_minus_one
                I[k, l] = 1.0 + Im1[k, l]
                eI[k, l] = p.ratio_error
            except UndefinedRatio:
                I[k, l] = Im1[k, l] = eI[k, l] = np.nan
                missing.append((k, l))
    a = bath.rate_prefactor * A
    return RateTable(bath.beta, channels.eps, A, B, D, a, I, Im1, eA, eB, eI,
                     bath.rate_prefactor, channels.labels, report, missing)


@dataclass
class IdentityReport:
    residuals: np.ndarray
    empty: bool

    @property
    def max_residual(self):
        r = self.residuals[np.isfinite(self.residuals)]
        return float(r.max(initial=0.0))


def dbe_identity_check(table, channels=None):
    """Residuals of ``a_kl exp(-beta eps_l) = a_lk exp(-beta eps_k) I(k, l)``.

    Pairs whose two sides both vanish get residual 0; ``empty`` flags a table
    with no nonzero rates at all.
    """
    eps = table.energies if channels is None else channels.eps
    n = eps.size
    shift = eps.min()
    boltz = np.exp(-table.beta * (eps - shift))
    res = np.zeros((n, n))
    for k in range(n):
        for l in range(n):
            if k == l:
                continue
            lhs = table.a[k, l] * boltz[l]
            rhs = table.a[l, k] * boltz[k] * table.I[k, l]
            scale = max(abs(lhs), abs(rhs))
            if not np.isfinite(rhs):
                res[k, l] = np.nan
            elif scale > 0:
                res[k, l] = abs(lhs - rhs) / scale
    off = ~np.eye(n, dtype=bool)
    return IdentityReport(res, bool(np.all(table.a[off] == 0)))
