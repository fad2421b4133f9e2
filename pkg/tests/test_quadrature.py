import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from detbal.errors import QuadratureFailure
from detbal.quadrature import GAUSS_WEIGHTS, KRONROD_WEIGHTS, NODES, gk15, integrate


def test_rule_weights_integrate_constants():
    assert KRONROD_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    assert GAUSS_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    assert np.allclose(NODES, -NODES[::-1])


@given(st.lists(st.floats(-3, 3), min_size=1, max_size=23))
def test_kronrod_exact_through_degree_22(coeffs):
    poly = np.polynomial.Polynomial(coeffs)
    val, err, _ = gk15(lambda x: poly(x)[:, None], np.array([-0.3]), np.array([1.7]))
    exact = poly.integ()(1.7) - poly.integ()(-0.3)
    assert val[0, 0] == pytest.approx(exact, rel=1e-12, abs=1e-11)


def test_vector_components_share_subdivision():
    f = lambda x: np.stack([np.exp(x), np.cos(3 * x), np.exp(x) - 1.0], axis=1)
    res = integrate(f, 0.0, 2.0, rtol=1e-12)
    exact = np.array([np.e ** 2 - 1, np.sin(6.0) / 3.0, np.e ** 2 - 3])
    assert np.allclose(res.value, exact, rtol=1e-12)
    assert np.all(res.error <= 1e-12 * np.abs(exact) + 1e-15)


def test_substituted_sqrt_endpoint():
    # int_0^1 e^-x / sqrt(x) dx with x = u^2 becomes int_0^1 2 e^{-u^2} du
    res = integrate(lambda u: 2.0 * np.exp(-u * u)[:, None], 0.0, 1.0, rtol=1e-12)
    from scipy.special import erf
    assert res.value[0] == pytest.approx(np.sqrt(np.pi) * erf(1.0), rel=1e-13)


def test_floor_rel_stops_small_difference_from_chasing_roundoff():
    f = lambda x: np.stack([np.sin(x) + 2, np.sin(x) + 2 - (np.sin(x) + 2)], axis=1)
    res = integrate(f, 0.0, 3.0, rtol=1e-10, floor_rel=1e-5)
    assert res.value[1] == 0.0


def test_interval_budget_raises():
    with pytest.raises(QuadratureFailure) as info:
        integrate(lambda x: (1.0 / np.abs(x - 0.3141592653))[:, None], 0.0, 1.0,
                  rtol=1e-12, limit=50)
    assert info.value.estimate is not None


def test_deterministic():
    f = lambda x: np.stack([np.exp(-x) * np.sin(5 * x)], axis=1)
    a = integrate(f, 0.0, 10.0, rtol=1e-11, initial=3)
    b = integrate(f, 0.0, 10.0, rtol=1e-11, initial=3)
    assert a.value.tobytes() == b.value.tobytes()


@settings(max_examples=30)
@given(st.floats(0.1, 20.0))
def test_exponential_family(lam):
    res = integrate(lambda x: np.exp(-lam * x)[:, None], 0.0, 5.0, rtol=1e-11)
    assert res.value[0] == pytest.approx(-np.expm1(-5 * lam) / lam, rel=1e-10)


def test_nonfinite_integrand_raises():
    with np.errstate(divide="ignore"):
        with pytest.raises(QuadratureFailure):
            integrate(lambda x: (1.0 / (x - x))[:, None], 0.0, 1.0)
