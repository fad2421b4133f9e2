"""Exact multichannel scattering of a 1D particle off a point contact.

The system has ``N`` nondegenerate levels (the scattering channels); the
particle couples to them only at the origin through a Hermitian ``N x N``
matrix ``v``.  In one dimension the Lippmann-Schwinger equation collapses to
the linear system

    (1 + i diag(b) v) psi = e_in / sqrt(2 pi hbar),
    b_j = sqrt(2m / (E - eps_j + i0)) / (2 hbar),

and the on-shell T matrix follows from ``psi``.  Everything here is a pure
function of its arguments.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ResonancePole, SingularSystem, ThresholdProximity

COND_CAP = 1e12
GUARD_REL = 1e-9


@dataclass(frozen=True)
class ChannelSet:
    """System eigenlevels, seen by the gas particle as scattering thresholds."""

    energies: tuple
    labels: tuple = None
    mass: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        energies = tuple(float(e) for e in self.energies)
        object.__setattr__(self, "energies", energies)
        if len(energies) < 2:
            raise ValueError("a channel set needs at least two levels")
        if not np.all(np.isfinite(energies)):
            raise ValueError("channel energies must be finite")
        if len(set(energies)) != len(energies):
            raise ValueError(f"channel energies must be pairwise distinct, got {energies}")
        if self.mass <= 0 or self.hbar <= 0:
            raise ValueError("mass and hbar must be positive")
        labels = self.labels
        if labels is None:
            labels = tuple(str(i) for i in range(len(energies)))
        labels = tuple(str(x) for x in labels)
        if len(labels) != len(energies):
            raise ValueError("one label per channel is required")
        object.__setattr__(self, "labels", labels)

    @property
    def n(self):
        return len(self.energies)

    @property
    def eps(self):
        return np.array(self.energies)

    @property
    def energy_scale(self):
        return max(self.energies) - min(self.energies)

    @property
    def threshold_guard(self):
        return GUARD_REL * self.energy_scale

    def index(self, label):
        """Channel index from either an integer or a label."""
        if isinstance(label, (int, np.integer)):
            return int(label)
        return self.labels.index(str(label))


@dataclass(frozen=True)
class CouplingMatrix:
    """Hermitian channel-coupling matrix of the point contact (energy x length)."""

    v: np.ndarray

    def __post_init__(self):
        v = np.array(self.v, dtype=complex)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("coupling matrix must be square")
        scale = max(np.abs(v).max(initial=0.0), np.finfo(float).tiny)
        if np.abs(v - v.conj().T).max(initial=0.0) > 1e-12 * scale:
            raise ValueError("coupling matrix is not Hermitian")
        v.setflags(write=False)
        object.__setattr__(self, "v", v)

    @property
    def n(self):
        return self.v.shape[0]

    def scaled(self, lam):
        return CouplingMatrix(lam * self.v)


class BFactors(tuple):
    """``(b, open)``: per-channel b factors and openness mask at one energy."""

    __slots__ = ()

    def __new__(cls, b, is_open):
        return super().__new__(cls, (b, is_open))

    @property
    def b(self):
        return self[0]

    @property
    def open(self):
        return self[1]


@dataclass
class ScatteringSolution:
    E: float
    j_in: int
    psi: np.ndarray
    t_row: np.ndarray
    open: np.ndarray = field(repr=False)
    condition: float = field(default=1.0, repr=False)


def b_factor(E, channel_energy, mass=1.0, hbar=1.0, guard=0.0):
    """``sqrt(2m / (E - eps + i0)) / (2 hbar)`` on the principal branch.

    Real and positive for an open channel, ``-i |b|`` for a closed one.
    """
    x = E - channel_energy
    if abs(x) <= guard or x == 0:
        raise ThresholdProximity(E, channel_energy, guard)
    if x > 0:
        return complex(np.sqrt(2.0 * mass / x) / (2.0 * hbar), 0.0)
    return complex(0.0, -np.sqrt(2.0 * mass / -x) / (2.0 * hbar))


def b_factors(E, channels):
    """All b factors at total energy ``E`` (guarded against thresholds)."""
    b = np.array([
        b_factor(E, e, channels.mass, channels.hbar, channels.threshold_guard)
        for e in channels.energies
    ])
    return BFactors(b, E > channels.eps)


def _coupling(v):
    return v.v if isinstance(v, CouplingMatrix) else np.asarray(v, dtype=complex)


def solve_channel_amplitudes(E, j_in, v, channels):
    """Amplitudes ``psi_j`` at the contact for a particle incoming in channel ``j_in``."""
    vm = _coupling(v)
    j_in = channels.index(j_in)
    if not E > channels.energies[j_in]:
        raise ValueError(f"incoming channel {channels.labels[j_in]} is closed at E={E}")
    bf = b_factors(E, channels)
    m = np.eye(channels.n) + 1j * bf.b[:, None] * vm
    cond = np.linalg.cond(m)
    if not np.isfinite(cond) or cond > COND_CAP:
        raise SingularSystem(E, cond)
    src = np.zeros(channels.n, dtype=complex)
    src[j_in] = 1.0 / np.sqrt(2.0 * np.pi * channels.hbar)
    psi = np.linalg.solve(m, src)
    sol = ScatteringSolution(E, j_in, psi, np.empty(channels.n, complex), bf.open, cond)
    sol.t_row = np.array([_t_from_psi(sol, j, channels) for j in range(channels.n)])
    return sol


def _t_from_psi(sol, j_out, channels):
    s = np.sqrt(2.0 * np.pi * channels.hbar)
    k_over = np.sqrt(complex(sol.E - channels.energies[j_out]) / (2.0 * channels.mass))
    delta = 1.0 if j_out == sol.j_in else 0.0
    return 1j / np.pi * k_over * (s * sol.psi[j_out] - delta)


def t_element(solution, j_out, channels=None):
    """``<p' j_out | T | p j_in>`` from a solved amplitude set.

    Elements for closed outgoing channels are returned too, but they are
    off-shell; ``solution.open[j_out]`` tells which is which.
    """
    if channels is None:
        return solution.t_row[j_out]
    return _t_from_psi(solution, channels.index(j_out), channels)


def t_matrix(E, v, channels, offsets=None):
    """Full T matrix ``T[..., j_out, j_in]`` at one or many total energies.

    Uses the threshold-regular form ``T = -i (D - D X D) / (2 pi hbar)`` with
    ``D = diag(1/b)`` and ``X = (D + i v)^-1``, algebraically identical to
    solving the amplitude system but finite exactly at thresholds.
    ``offsets`` may supply ``E - eps_j`` directly (shape ``(n, N)``) so that
    quadrature nodes close to a threshold keep full relative precision.
    """
    vm = _coupling(v)
    scalar = np.ndim(E) == 0
    E = np.atleast_1d(np.asarray(E, dtype=float))
    if offsets is None:
        offsets = E[:, None] - channels.eps[None, :]
    hbar, mass = channels.hbar, channels.mass
    d = 2.0 * hbar * np.sqrt(offsets.astype(complex) / (2.0 * mass))
    a = 1j * vm[None, :, :] + d[:, :, None] * np.eye(channels.n)[None, :, :]
    cond = np.linalg.cond(a)
    bad = ~np.isfinite(cond) | (cond > COND_CAP)
    if bad.any():
        k = int(np.argmax(bad))
        raise SingularSystem(float(E[k]), float(cond[k]))
    x = np.linalg.inv(a)
    t = d[:, :, None] * np.eye(channels.n)[None] - d[:, :, None] * x * d[:, None, :]
    t *= -1j / (2.0 * np.pi * hbar)
    return t[0] if scalar else t


def _pair_t(E, j_out, j_in, v, channels):
    j_out, j_in = channels.index(j_out), channels.index(j_in)
    for j in (j_out, j_in):
        if np.any(np.asarray(E) <= channels.energies[j]):
            raise ValueError(f"channel {channels.labels[j]} is closed at the requested energy")
    t = t_matrix(E, v, channels)
    return t[..., j_out, j_in], t[..., j_in, j_out]


def hermiticity_defect(E, j_out, j_in, v, channels):
    """``<p' j'|T|p j> - conj(<p j|T|p' j'>)``; vanishes to first order in ``v``."""
    fwd, rev = _pair_t(E, j_out, j_in, v, channels)
    return fwd - np.conj(rev)


def symmetry_defect(E, j_out, j_in, v, channels):
    """``<p' j'|T|p j> - <p j|T|p' j'>``."""
    fwd, rev = _pair_t(E, j_out, j_in, v, channels)
    return fwd - rev


def time_reversal_defect(E, j_out, j_in, v, channels):
    """``|<p' j'|T|p j>|^2 - |<p j|T|p' j'>|^2`` (time reversal combined with parity)."""
    fwd, rev = _pair_t(E, j_out, j_in, v, channels)
    return np.abs(fwd) ** 2 - np.abs(rev) ** 2


def _check_three_channel(vm):
    if vm.shape != (3, 3):
        raise ValueError("closed forms need exactly three channels")
    scale = np.abs(vm).max()
    diag, alpha = vm[0, 0], vm[0, 1]
    ok = (np.allclose(np.diag(vm), diag, rtol=0, atol=1e-12 * scale)
          and np.allclose([vm[1, 2], vm[2, 0]], alpha, rtol=0, atol=1e-12 * scale))
    if not ok:
        raise ValueError("closed forms need the cyclic (three-dot) coupling structure")


def inverse_norm_3ch(bm, b0, bp, v00, vm0, vp0):
    """``1/N_psi`` of the closed-form three-channel amplitudes."""
    return (
        -1j * (-1j + bm * v00) * (-1j + bp * v00) + 1j * bm * bp * vm0 * vp0
        + b0 * (-1j * (bm + bp) * v00 ** 2 + bm * bp * v00 ** 3 + bm * bp * vm0 ** 3
                + 1j * (bm + bp) * vm0 * vp0 + bm * bp * vp0 ** 3
                - v00 * (1 + 3 * bm * bp * vm0 * vp0))
    )


def closed_form_amplitudes_3ch(E, j_in, v, channels):
    """Closed-form ``psi`` for three channels ordered ``(-, 0, +)`` with cyclic coupling.

    The printed expressions are for an incoming ``0`` particle; the other two
    incoming channels follow by cyclically relabelling ``- -> 0 -> + -> -``,
    which leaves the coupling matrix unchanged.
    """
    vm = _coupling(v)
    _check_three_channel(vm)
    j_in = channels.index(j_in)
    b = b_factors(E, channels).b
    shift = (j_in - 1) % 3
    im_, i0, ip = (0 + shift) % 3, (1 + shift) % 3, (2 + shift) % 3
    bm, b0, bp = b[im_], b[i0], b[ip]
    v00, vm0, vp0 = vm[1, 1], vm[0, 1], vm[2, 1]

    inv_n = inverse_norm_3ch(bm, b0, bp, v00, vm0, vp0)
    if abs(inv_n) <= 1e-12:
        raise ResonancePole(E, inv_n)
    n_psi = 1.0 / inv_n
    out = np.empty(3, dtype=complex)
    out[i0] = n_psi * (-1j * (-1j + bm * v00) * (-1j + bp * v00) + 1j * bm * bp * vm0 * vp0)
    out[ip] = n_psi * bp * (vp0 - 1j * bm * (vm0 ** 2 - v00 * vp0))
    out[im_] = n_psi * bm * (vm0 - 1j * bp * (vp0 ** 2 - v00 * vm0))
    return out / np.sqrt(2.0 * np.pi * channels.hbar)
