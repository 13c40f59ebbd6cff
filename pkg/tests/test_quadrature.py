"""Quadrature kernels against closed-form oracles."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skewflow.errors import BudgetExceeded, NonFinite
from skewflow.quadrature import integrate_finite, integrate_tail, sum_tail


def test_constant_one():
    r = integrate_finite(lambda t: 1.0, 0.0, 1.0, 1e-10)
    assert r.converged
    assert r.value == pytest.approx(1.0, abs=1e-12)


def test_exp_decay_truncated_at_20():
    # closed-form antiderivative: 1 - e^-20
    r = integrate_finite(math.exp if False else (lambda t: math.exp(-t)), 0.0, 20.0, 1e-8)
    assert r.converged
    assert abs(r.value - 0.9999999979388464) <= 1e-8


def test_sin_over_half_period():
    r = integrate_finite(math.sin, 0.0, math.pi, 1e-8)
    assert r.converged
    assert abs(r.value - 2.0) <= 1e-7


@pytest.mark.parametrize("nu", [0.5, 1.0, 2.0])
def test_exponential_oracles(nu):
    # exact value (1 - e^{-5 nu}) / nu on [0, 5]
    tol = 1e-9
    r = integrate_finite(lambda t: math.exp(-nu * t), 0.0, 5.0, tol)
    exact = (1.0 - math.exp(-5.0 * nu)) / nu
    assert abs(r.value - exact) <= 10 * tol


@pytest.mark.parametrize("coeffs", [(1.0, 0.0, 0.0, 0.0), (0.0, 1.0, 0.5, 0.25), (2.0, -3.0, 1.0, 4.0)])
def test_cubic_oracles(coeffs):
    a, b, c, d = coeffs
    f = lambda t: a + b * t + c * t * t + d * t ** 3
    exact = a + b / 2.0 + c / 3.0 + d / 4.0
    r = integrate_finite(f, 0.0, 1.0, 1e-10)
    assert abs(r.value - exact) <= 1e-9


def test_tail_exponential():
    r = integrate_tail(lambda s: math.exp(-s), 0.0, 1e-6, 100.0)
    assert r.converged
    assert abs(r.value - 1.0) <= 1e-6


def test_tail_zero():
    r = integrate_tail(lambda s: 0.0, 0.0, 1e-8, 100.0)
    assert r.converged
    assert r.value == 0.0


def test_tail_divergence_signal():
    r = integrate_tail(lambda s: 0.6, 0.0, 1e-6, 100.0)
    assert not r.converged
    assert r.value == pytest.approx(60.0, rel=1e-6)
    assert r.truncation_horizon == pytest.approx(100.0)


def test_tail_monotone_in_horizon():
    values = []
    for cap in (10.0, 20.0, 40.0, 80.0):
        r = integrate_tail(lambda s: 1.0 / (1.0 + s), 0.0, 1e-9, cap)
        values.append(r.value)
    assert values == sorted(values)


def test_sum_geometric():
    r = sum_tail(lambda k: math.exp(-k), 0, 1e-6, 10000)
    assert r.converged
    assert abs(r.value - 1.5819767068693265) <= 1e-6


def test_sum_zero():
    r = sum_tail(lambda k: 0.0, 0, 1e-8, 100)
    assert r.converged
    assert r.value == 0.0


def test_sum_harmonic_divergence():
    r = sum_tail(lambda k: 1.0 / (k + 1), 0, 1e-6, 10000)
    assert not r.converged
    assert r.value == pytest.approx(9.787606036044348, rel=1e-12)


def test_converged_implies_error_within_tolerance():
    for tol in (1e-6, 1e-8, 1e-10):
        r = integrate_finite(lambda t: math.exp(-t), 0.0, 5.0, tol)
        if r.converged:
            assert r.abs_error_estimate <= tol + 1e-9 * abs(r.value)
    r = sum_tail(lambda k: math.exp(-k), 0, 1e-6, 1000)
    assert r.converged and r.abs_error_estimate <= 1e-6


def test_determinism_bit_identical():
    def f(t):
        return math.sin(3.0 * t) * math.exp(-0.25 * t) + 1.0 / (1.0 + t)

    a = integrate_finite(f, 0.0, 7.0, 1e-9)
    b = integrate_finite(f, 0.0, 7.0, 1e-9)
    assert (a.value, a.abs_error_estimate, a.evaluations) == (b.value, b.abs_error_estimate, b.evaluations)
    ta = integrate_tail(lambda s: math.exp(-0.5 * s), 0.0, 1e-8, 50.0)
    tb = integrate_tail(lambda s: math.exp(-0.5 * s), 0.0, 1e-8, 50.0)
    assert (ta.value, ta.evaluations) == (tb.value, tb.evaluations)


def test_nonfinite_integrand_raises():
    with pytest.raises(NonFinite):
        integrate_finite(lambda t: float("nan"), 0.0, 1.0, 1e-6)
    with pytest.raises(NonFinite):
        integrate_tail(lambda s: math.exp(s), 0.0, 1e-6, 1000.0)  # overflows near 710
    with pytest.raises(NonFinite):
        sum_tail(lambda k: float("inf"), 0, 1e-6, 10)


def test_budget_cap():
    with pytest.raises(BudgetExceeded):
        integrate_finite(lambda t: math.sin(1.0 / (t + 1e-9)), 0.0, 1.0, 1e-14, eval_cap=200)


@given(st.floats(min_value=0.1, max_value=3.0), st.floats(min_value=0.5, max_value=8.0))
@settings(max_examples=60, deadline=None)
def test_exponential_tail_identity(nu, a):
    # integral over [a, inf) of e^{-nu s} is e^{-nu a} / nu
    r = integrate_tail(lambda s, nu=nu: math.exp(-nu * s), a, 1e-7, 200.0)
    assert r.converged
    assert abs(r.value - math.exp(-nu * a) / nu) <= 1e-6


@given(
    st.lists(st.floats(min_value=-3.0, max_value=3.0), min_size=2, max_size=4),
    st.floats(min_value=0.5, max_value=4.0),
)
@settings(max_examples=60, deadline=None)
def test_polynomial_against_antiderivative(coeffs, b):
    def f(t):
        return sum(c * t ** i for i, c in enumerate(coeffs))

    exact = sum(c * b ** (i + 1) / (i + 1) for i, c in enumerate(coeffs))
    r = integrate_finite(f, 0.0, b, 1e-9)
    assert abs(r.value - exact) <= 1e-7 * max(1.0, abs(exact))
