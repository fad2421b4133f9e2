from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from detbal import reference_triangle
from detbal.errors import DomainError
from detbal.pauli import build_generator, evolve, gibbs_state
from detbal.thermal_rates import ThermalBath, rate_matrix
from detbal.thermo import (HEAT_ORIENTATION, CurrentSet, entropy_decomposition,
                           entropy_production, equilibrium_currents_closed_form,
                           equilibrium_deviation_term, heat_currents, heat_currents_3qd,
                           probability_currents, thermalization_residuals)

REF = reference_triangle()
CH = REF.channels()
M, Z, P = 0, 1, 2


@pytest.fixture(scope="module")
def table():
    return rate_matrix(ThermalBath(1.0), CH, REF.coupling())


@pytest.fixture(scope="module")
def balanced():
    # hand-built rates obeying detailed balance at beta = 1
    eps = CH.eps
    s = np.array([[0, 1.0, 0.4], [1.0, 0, 2.0], [0.4, 2.0, 0]])
    a = s * np.exp(-0.5 * (eps[:, None] - eps[None, :]))
    return replace(rate_matrix(ThermalBath(1.0), CH, np.zeros((3, 3))), a=a, I=np.ones((3, 3)),
                   I_minus_one=np.zeros((3, 3)))


def test_sigma_vanishes_at_equilibrium(table):
    gen = build_generator(table)
    q = gibbs_state(1.0, CH)
    assert abs(entropy_production(q, gen, q)) <= 1e-12
    assert entropy_production([0.2, 0.3, 0.5], np.zeros((3, 3)), q) == 0.0


def test_sigma_positive_off_equilibrium_and_decomposes(table):
    gen = build_generator(table)
    q = gibbs_state(1.0, CH)
    p = [0.98, 0.01, 0.01]
    sigma = entropy_production(p, gen, q)
    rep = entropy_decomposition(p, table, q)
    assert sigma > 0
    assert rep.sigma == sigma
    assert rep.schnakenberg_term + rep.deviation_term == pytest.approx(sigma, rel=1e-10)


def test_empty_level_with_inflow_is_a_domain_error(table):
    gen = build_generator(table)
    with pytest.raises(DomainError):
        entropy_production([1.0, 0.0, 0.0], gen, gibbs_state(1.0, CH))


def test_balanced_table_has_no_deviation(balanced):
    rep = entropy_decomposition([0.5, 0.3, 0.2], balanced)
    assert rep.deviation_term == 0.0
    assert rep.sigma == pytest.approx(rep.schnakenberg_term, rel=1e-12)
    q = gibbs_state(1.0, CH)
    assert np.abs(probability_currents(q, balanced).K).max() <= 1e-15
    assert np.abs(heat_currents(balanced).J).max() == 0.0


def test_equilibrium_split(table):
    q = gibbs_state(1.0, CH)
    rep = entropy_decomposition(q, table)
    assert rep.deviation_term < 0
    assert rep.schnakenberg_term == pytest.approx(-rep.deviation_term, rel=1e-9)
    assert abs(rep.sigma) <= 1e-12
    assert rep.deviation_term == pytest.approx(equilibrium_deviation_term(table), rel=1e-9)
    assert rep.closure <= 1e-10


@settings(max_examples=40, deadline=None)
@given(arrays(float, 3, elements=st.floats(0.01, 1.0)))
def test_decomposition_closure_interior(raw):
    t = rate_matrix(ThermalBath(2.0), CH, REF.coupling())
    rep = entropy_decomposition(raw / raw.sum(), t)
    assert rep.closure <= 1e-10
    assert rep.sigma >= -1e-10


def test_currents_antisymmetric_by_construction():
    c = CurrentSet(np.arange(9.0).reshape(3, 3))
    assert np.array_equal(c.K, -c.K.T)
    assert np.all(np.diag(c.K) == 0)


def test_loop_current_and_closed_form(table):
    q = gibbs_state(1.0, CH)
    cur = probability_currents(q, table)
    loop = cur.loop_currents([Z, P, M])  # K_{+0}, K_{-+}, K_{0-}
    assert abs(loop[0]) > 1e-2 * table.a.max()
    assert np.allclose(loop, loop[0], rtol=1e-8, atol=0)
    closed = equilibrium_currents_closed_form(table, q)
    assert np.allclose(cur.K, closed, rtol=1e-8, atol=1e-12 * abs(loop[0]))


def test_heat_currents(table):
    cur = heat_currents(table, CH, 1.0)
    assert cur.cyclic_heat_sum([P, Z, M]) == pytest.approx(0.0, abs=1e-10)
    closed = heat_currents_3qd(table)
    for (i, j) in HEAT_ORIENTATION:
        assert cur.oriented_heat(i, j) == pytest.approx(closed[(i, j)], rel=1e-6)
        assert cur.J[i, j] != 0
    q = gibbs_state(1.0, CH)
    loop = probability_currents(q, table).K
    eps = CH.eps
    assert np.allclose(cur.J, loop * (eps[:, None] - eps[None, :]), rtol=1e-8, atol=1e-14)


def test_thermalization_conditions(table):
    first, second = thermalization_residuals(table)
    assert first.residual <= 1e-6 and second.residual <= 1e-6
    assert abs(first.lhs) > 0


def test_conditions_are_sensitive_to_rates(table):
    a = table.a.copy()
    a[P, Z] *= 1.01
    first, _ = thermalization_residuals(replace(table, a=a))
    assert first.residual >= 1e-3


def test_conditions_trivial_when_balanced(balanced):
    first, second = thermalization_residuals(balanced)
    assert first.residual == 0.0 and second.residual == 0.0


def test_spohn_along_trajectories(table):
    gen = build_generator(table)
    q = gibbs_state(1.0, CH)
    rng = np.random.default_rng(11)
    for p0 in rng.dirichlet(np.ones(3), size=25):
        traj = evolve(p0, gen, 30.0 / gen.scale, steps=15)
        for p in traj.populations:
            assert entropy_production(p, gen, q) >= -1e-10
