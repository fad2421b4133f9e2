"""Pauli master equation for eigenstate populations.

``dp/dt = W p`` with ``W[k, l] = a_kl`` (rate of ``l -> k``) off the diagonal
and ``W[l, l] = -sum_k a_kl``, so every column sums to zero.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import IncompleteTable, NonErgodic

NEG_TOL = 1e-14
NORM_TOL = 1e-12


@dataclass(frozen=True)
class PauliGenerator:
    W: np.ndarray

    def __post_init__(self):
        W = np.array(self.W, dtype=float)
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise ValueError("generator must be square")
        off = ~np.eye(W.shape[0], dtype=bool)
        if np.any(W[off] < 0):
            raise ValueError("off-diagonal rates must be nonnegative")
        W.setflags(write=False)
        object.__setattr__(self, "W", W)

    @property
    def n(self):
        return self.W.shape[0]

    @property
    def scale(self):
        return float(np.abs(self.W).max(initial=0.0))

    def column_sums(self):
        return self.W.sum(axis=0)

    def residual(self, p):
        """``|W p|_inf / max|W|`` (0 for the zero generator)."""
        p = p.p if isinstance(p, PopulationState) else np.asarray(p)
        s = self.scale
        return float(np.abs(self.W @ p).max() / s) if s > 0 else 0.0


@dataclass(frozen=True)
class PopulationState:
    p: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.ndim != 1 or not np.all(np.isfinite(p)):
            raise ValueError("populations must be a finite vector")
        if p.min() < -NEG_TOL:
            raise ValueError(f"negative population {p.min():.3e}")
        if abs(p.sum() - 1.0) > NORM_TOL:
            raise ValueError(f"populations sum to {p.sum()!r}, not 1")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    def trace_distance(self, other):
        q = other.p if isinstance(other, PopulationState) else np.asarray(other)
        return 0.5 * float(np.abs(self.p - q).sum())


def build_generator(table):
    """Generator from a :class:`~detbal.thermal_rates.RateTable` or a bare rate matrix."""
    a = np.array(getattr(table, "a", table), dtype=float)
    n = a.shape[0]
    off = ~np.eye(n, dtype=bool)
    if not np.all(np.isfinite(a[off])):
        bad = [(int(k), int(l)) for k, l in zip(*np.nonzero(off & ~np.isfinite(a)))]
        raise IncompleteTable(f"missing rates for pairs {bad}")
    W = np.where(off, a, 0.0)
    np.fill_diagonal(W, -W.sum(axis=0))
    return PauliGenerator(W)


def gibbs_state(beta, channels):
    """Boltzmann populations, evaluated with the lowest level shifted to zero."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    eps = np.asarray(getattr(channels, "eps", channels), dtype=float)
    w = np.exp(-beta * (eps - eps.min()))
    return PopulationState(w / w.sum())


def communicating_classes(W, tol=0.0):
    """Strongly connected components of the transition graph ``l -> k`` where ``W[k, l] > tol``."""
    n = W.shape[0]
    adj = (W > tol) & ~np.eye(n, dtype=bool)
    reach = adj | np.eye(n, dtype=bool)
    for k in range(n):
        reach = reach | (reach[:, [k]] & reach[[k], :])
    seen, classes = set(), []
    for i in range(n):
        if i in seen:
            continue
        cls = [j for j in range(n) if reach[i, j] and reach[j, i]]
        seen.update(cls)
        classes.append(cls)
    return classes


def stationary_state(gen, rel_gap=1e-12):
    """Normalized null vector of ``W`` from its smallest right singular vector."""
    W = gen.W
    scale = gen.scale
    if scale == 0:
        raise NonErgodic("all rates vanish; every state is stationary",
                         [[k] for k in range(gen.n)])
    _, s, vt = np.linalg.svd(W / scale)
    if gen.n > 1 and s[-2] <= rel_gap:
        # reachability read from W^T so that classes are closed under k -> l
        raise NonErgodic(f"stationary state is not unique (singular values {s})",
                         communicating_classes(W.T))
    p = vt[-1]
    p = p * np.sign(p.sum())
    p = np.clip(p, 0.0, None)
    return PopulationState(p / p.sum())


@dataclass
class Trajectory:
    times: np.ndarray
    populations: np.ndarray
    clamped: list = field(default_factory=list)

    def states(self):
        return [PopulationState(p, t) for t, p in zip(self.times, self.populations)]

    @property
    def final(self):
        return PopulationState(self.populations[-1], float(self.times[-1]))


def evolve(p0, gen, t, steps=1):
    """``p(t_i) = exp(W t_i) p0`` on ``steps`` equal checkpoints up to ``t`` (or on an explicit grid).

    Entries in ``[-1e-14, 0)`` are clamped to zero and recorded in ``clamped``
    as ``(time, index, value)``; anything more negative is an error.
    """
    p0 = p0 if isinstance(p0, PopulationState) else PopulationState(p0)
    if np.ndim(t) == 0:
        if t < 0:
            raise ValueError("evolution time must be nonnegative")
        times = np.linspace(0.0, float(t), int(steps) + 1)
    else:
        times = np.asarray(t, dtype=float)
        if np.any(times < 0):
            raise ValueError("evolution times must be nonnegative")
    out = np.empty((times.size, gen.n))
    clamped = []
    for i, ti in enumerate(times):
        p = p0.p.copy() if ti == 0 else expm(gen.W * ti) @ p0.p
        neg = np.flatnonzero(p < 0)
        for k in neg:
            if p[k] < -NEG_TOL:
                raise ArithmeticError(f"population {k} reached {p[k]:.3e} at t={ti}")
            clamped.append((float(ti), int(k), float(p[k])))
            p[k] = 0.0
        out[i] = p
    return Trajectory(times + p0.time, out, clamped)
