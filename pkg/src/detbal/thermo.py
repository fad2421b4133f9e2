"""Entropy production, probability and heat currents, thermalization conditions."""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .pauli import PopulationState, build_generator, gibbs_state

RESIDUAL_FLOOR = 1e-30


def _vec(p):
    return p.p if isinstance(p, PopulationState) else np.asarray(p, dtype=float)


def _gen_matrix(gen):
    return gen.W if hasattr(gen, "W") else build_generator(gen).W


@dataclass(frozen=True)
class EntropyReport:
    sigma: float
    schnakenberg_term: float
    deviation_term: float
    scale: float = 0.0  # sum of |each term|; sigma itself can vanish by cancellation

    @property
    def closure(self):
        """Relative mismatch between ``sigma`` and the sum of its two terms."""
        gap = abs(self.sigma - self.schnakenberg_term - self.deviation_term)
        return gap / max(abs(self.sigma), self.scale, RESIDUAL_FLOOR)


def entropy_production(p, gen, p_eq):
    """``sigma = sum_k (dp_k/dt) (ln p_eq_k - ln p_k)``.

    A level with ``p_k = 0`` contributes nothing if its flow vanishes; a
    nonzero flow into an empty level makes the logarithm diverge and raises
    :class:`DomainError`.
    """
    p, q = _vec(p), _vec(p_eq)
    W = _gen_matrix(gen)
    pdot = W @ p
    sigma = 0.0
    for k in range(p.size):
        if pdot[k] == 0:
            continue
        if p[k] <= 0 or q[k] <= 0:
            raise DomainError(f"level {k} is empty but has flow {pdot[k]:.3e}")
        sigma += pdot[k] * (np.log(q[k]) - np.log(p[k]))
    return float(sigma)


def _pair_currents(p, a):
    # K[j, k] = a_jk p_k - a_kj p_j, current from k into j
    flow = a * p[None, :]
    K = flow - flow.T
    np.fill_diagonal(K, 0.0)
    return K


def entropy_decomposition(p, table, p_eq=None):
    """Split ``sigma`` into the network (Schnakenberg) term and the term in ``ln I``.

    Both terms sum over pairs ``k > j`` of ``K_jk ln(p_k a_jk / (p_j a_kj))`` and
    ``K_jk ln I(k, j)``.  ``sigma`` itself is evaluated independently from the
    populations and the Gibbs state (``p_eq`` defaults to the table's).
    """
    p = _vec(p)
    a = np.asarray(table.a, dtype=float)
    I = np.asarray(table.I, dtype=float)
    if p_eq is None:
        p_eq = gibbs_state(table.beta, table.energies)
    K = _pair_currents(p, a)
    schnak = dev = scale = 0.0
    n = p.size
    for k in range(n):
        for j in range(k):
            kjk = K[j, k]
            if kjk == 0:
                continue
            num, den = p[k] * a[j, k], p[j] * a[k, j]
            if num <= 0 or den <= 0:
                raise DomainError(f"pair ({j},{k}) carries current {kjk:.3e} across a zero")
            s_term = kjk * np.log(num / den)
            d_term = kjk * np.log(I[k, j])
            schnak += s_term
            dev += d_term
            scale += abs(s_term) + abs(d_term)
    sigma = entropy_production(p, build_generator(a), p_eq)
    return EntropyReport(sigma, float(schnak), float(dev), float(scale))


def equilibrium_deviation_term(table, p_eq=None):
    """``sum_{k>j} a_jk p_eq_k (1 - I(k, j)) ln I(k, j)``, never positive."""
    q = _vec(p_eq) if p_eq is not None else gibbs_state(table.beta, table.energies).p
    total = 0.0
    for k in range(q.size):
        for j in range(k):
            ikj = table.I[k, j]
            total += table.a[j, k] * q[k] * (1.0 - ikj) * np.log(ikj)
    return float(total)


@dataclass(frozen=True)
class CurrentSet:
    """Probability currents ``K`` (antisymmetric) and pairwise heat currents ``J``.

    ``K[j, k]`` is the net probability flow from ``k`` into ``j``.  ``J[m, l]``
    is ``-beta^-1 a_lm p_m (I(m, l) - 1) ln(p_m / p_l)``, the heat exchanged with
    the bath through transitions between ``m`` and ``l``; as defined it is
    symmetric in the pair, and :meth:`oriented_heat` gives it a direction.
    """

    K: np.ndarray
    J: np.ndarray = None

    def __post_init__(self):
        K = np.array(self.K, dtype=float)
        upper = np.triu(K, 1)
        K = upper - upper.T
        K.setflags(write=False)
        object.__setattr__(self, "K", K)
        if self.J is not None:
            J = np.array(self.J, dtype=float)
            upper = np.triu(J, 1)
            J = upper + upper.T
            J.setflags(write=False)
            object.__setattr__(self, "J", J)

    def loop_currents(self, cycle):
        """``K`` along consecutive edges of a cycle of state indices."""
        return [self.K[cycle[(i + 1) % len(cycle)], cycle[i]] for i in range(len(cycle))]

    def oriented_heat(self, m, l):
        return self.J[m, l]

    def cyclic_heat_sum(self, cycle):
        return float(sum(self.J[cycle[(i + 1) % len(cycle)], cycle[i]]
                         for i in range(len(cycle))))


def probability_currents(p, table):
    """``K_jk = a_jk p_k - a_kj p_j`` for every pair."""
    return CurrentSet(_pair_currents(_vec(p), np.asarray(table.a, dtype=float)))


def equilibrium_currents_closed_form(table, p_eq=None):
    """``K_jk = a_kj p_eq_j (I(j, k) - 1)``: equilibrium currents from the ratios alone."""
    q = _vec(p_eq) if p_eq is not None else gibbs_state(table.beta, table.energies).p
    n = q.size
    K = np.zeros((n, n))
    for j in range(n):
        for k in range(n):
            if j != k:
                K[j, k] = table.a[k, j] * q[j] * table.I_minus_one[j, k]
    return K


def heat_currents(table, channels=None, beta=None):
    """Equilibrium heat currents between level pairs, with ``p = p_eq``."""
    beta = table.beta if beta is None else beta
    eps = table.energies if channels is None else channels.eps
    q = gibbs_state(beta, eps).p
    n = q.size
    J = np.zeros((n, n))
    for m in range(n):
        for l in range(n):
            if m == l:
                continue
            log_ratio = -beta * (eps[m] - eps[l])  # ln(p_m / p_l) without cancellation
            J[m, l] = -table.a[l, m] * q[m] * table.I_minus_one[m, l] * log_ratio / beta
    p_set = probability_currents(q, table)
    return CurrentSet(p_set.K, J)


MINUS, ZERO, PLUS = 0, 1, 2
HEAT_ORIENTATION = ((PLUS, MINUS), (MINUS, ZERO), (ZERO, PLUS))


def heat_currents_3qd(table):
    """Closed form ``J_ij = N (I(+,-) - 1)(eps_i - eps_j)`` for three levels ordered ``(-, 0, +)``.

    ``N = a_{-+} p_eq_+``; the value holds for the orientations in
    :data:`HEAT_ORIENTATION`, the direction in which the loop current runs.
    Returns a dict keyed by those ordered pairs.
    """
    eps = table.energies
    q = gibbs_state(table.beta, eps).p
    norm = table.a[MINUS, PLUS] * q[PLUS]
    amp = norm * table.I_minus_one[PLUS, MINUS]
    return {(i, j): amp * (eps[i] - eps[j]) for i, j in HEAT_ORIENTATION}


@dataclass(frozen=True)
class ConditionResidual:
    lhs: float
    rhs: float

    @property
    def residual(self):
        if self.lhs == self.rhs:
            return 0.0
        return abs(self.lhs - self.rhs) / max(abs(self.lhs), abs(self.rhs), RESIDUAL_FLOOR)


def thermalization_residuals(table):
    """Both cross-frequency conditions for three levels ordered ``(-, 0, +)``.

    ``a_{+0} (1 - I(0,+)) = a_{-0} (I(0,-) - 1)`` and
    ``a_{0+} (1 - 1/I(0,+)) = a_{-+} (I(+,-) - 1)``.
    """
    if table.a.shape != (3, 3):
        raise ValueError("thermalization conditions are defined for three levels")
    a, im1 = table.a, table.I_minus_one
    i_0p = table.I[ZERO, PLUS]
    first = ConditionResidual(a[PLUS, ZERO] * -im1[ZERO, PLUS], a[MINUS, ZERO] * im1[ZERO, MINUS])
    second = ConditionResidual(a[ZERO, PLUS] * im1[ZERO, PLUS] / i_0p,
                               a[MINUS, PLUS] * im1[PLUS, MINUS])
    return first, second
