"""Single electron on three quantum dots in a ring threaded by a magnetic flux.

Eigenstates are labelled ``j in (-1, 0, +1)`` (written ``-``, ``0``, ``+``) and
always returned in that order.  The dot-basis eigenvectors are
``<iota|j> = omega**(j (iota - 1)) / sqrt(3)`` with ``omega = exp(2 pi i / 3)``;
they do not depend on the flux, which only moves the levels
``eps_j = 2 tau cos(2 pi (j - phi) / 3)``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpectrum, NonUnitaryBasis
from .scattering import ChannelSet, CouplingMatrix

LABELS = ("-", "0", "+")
J_VALUES = (-1, 0, 1)
OMEGA = np.exp(2j * np.pi / 3)


def hamiltonian_3qd(tau, phi):
    """Dot-basis Hamiltonian with hopping ``tau`` and flux ``phi`` (flux quanta)."""
    if tau == 0:
        raise ValueError("tau must be nonzero")
    z = np.exp(-2j * np.pi * phi / 3)
    zc = np.conj(z)
    return tau * np.array([
        [0, z, zc],
        [zc, 0, z],
        [z, zc, 0],
    ])


def eigenenergies(tau, phi, gap_guard=1e-9, by_label=False):
    """The three levels in ascending order, or as ``(eps_-, eps_0, eps_+)`` with ``by_label``.

    Raises :class:`DegenerateSpectrum` if two levels are closer than ``gap_guard * |tau|``.
    """
    eps = np.array([2.0 * tau * np.cos(2.0 * np.pi * (j - phi) / 3.0) for j in J_VALUES])
    gaps = np.abs(eps[:, None] - eps[None, :])[np.triu_indices(3, 1)]
    if gaps.min() < gap_guard * abs(tau):
        raise DegenerateSpectrum(f"levels {eps} are degenerate at tau={tau}, phi={phi}")
    return eps if by_label else np.sort(eps)


def eigenbasis_overlaps():
    """``W[j, iota] = <j|chi_iota>`` for eigenstates ``(-, 0, +)`` and dots ``1, 2, 3``."""
    jj = np.array(J_VALUES)[:, None]
    ii = np.arange(3)[None, :]
    return OMEGA ** (-jj * ii) / np.sqrt(3.0)


def general_site_coupling(site_strengths, overlaps):
    """``v = W diag(V) W^dagger`` from contact strengths and eigenbasis overlaps."""
    w = np.asarray(overlaps, dtype=complex)
    strengths = np.asarray(site_strengths, dtype=float)
    if w.shape != (strengths.size, strengths.size):
        raise ValueError("overlap matrix must be square with one column per site")
    if np.abs(w @ w.conj().T - np.eye(w.shape[0])).max() > 1e-12:
        raise NonUnitaryBasis("eigenbasis overlaps are not unitary")
    v = (w * strengths[None, :]) @ w.conj().T
    return CouplingMatrix(0.5 * (v + v.conj().T))


def coupling_from_sites(site_strengths):
    """Closed-form three-dot coupling in the ``(-, 0, +)`` eigenbasis."""
    v1, v2, v3 = (float(x) for x in site_strengths)
    diag = (v1 + v2 + v3) / 3.0
    alpha = (v1 - 0.5 * (v2 + v3) + 0.5j * np.sqrt(3.0) * (v2 - v3)) / 3.0
    ac = np.conj(alpha)
    # rows/cols ordered (-, 0, +): v_{-0} = v_{0+} = v_{+-} = alpha
    return CouplingMatrix(np.array([
        [diag, alpha, ac],
        [ac, diag, alpha],
        [alpha, ac, diag],
    ]))


@dataclass(frozen=True)
class TriangleModel:
    """Three-dot system plus its point-contact strengths.

    Give either ``tau`` and ``phi`` or explicit ``energies`` ordered ``(-, 0, +)``.
    """

    site_strengths: tuple
    tau: float = None
    phi: float = None
    energies: tuple = None
    mass: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "site_strengths", tuple(float(x) for x in self.site_strengths))
        if len(self.site_strengths) != 3:
            raise ValueError("three site strengths are required")
        if self.energies is None:
            if self.tau is None or self.phi is None:
                raise ValueError("give either energies or both tau and phi")
            object.__setattr__(self, "energies", tuple(eigenenergies(self.tau, self.phi, by_label=True)))
        else:
            object.__setattr__(self, "energies", tuple(float(e) for e in self.energies))
            if len(self.energies) != 3:
                raise ValueError("three energies are required")

    def channels(self):
        return ChannelSet(self.energies, LABELS, self.mass, self.hbar)

    def coupling(self):
        return coupling_from_sites(self.site_strengths)

    def scaled(self, lam):
        return TriangleModel(tuple(lam * x for x in self.site_strengths),
                             energies=self.energies, mass=self.mass, hbar=self.hbar)


def reference_triangle():
    """Contact strengths (1, 0.7, 1.5) and levels (-0.5, 0, 0.5)."""
    return TriangleModel((1.0, 0.7, 1.5), energies=(-0.5, 0.0, 0.5))
