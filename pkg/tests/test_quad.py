import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from isolyap import quad
from isolyap.errors import DomainError, NormalizationError
from isolyap.specfun import EULER_GAMMA

LN2 = math.log(2.0)
# int_0^1 x^-1/2 (1-x)^-1/2 ln(1 - 0.9 x) dx, mpmath at 30 digits.
BETA_LOG_HALF_HALF = -2.62874202977177346


def test_frullani_exponential():
    res = quad.integrate_frullani(lambda t: math.exp(-2 * t), g_minus_one=lambda t: math.expm1(-2 * t))
    assert abs(res.value - LN2) <= 1e-10
    assert res.est_abs_error <= 1e-10 and res.evaluations > 0


def test_frullani_euler_gamma():
    res = quad.integrate_frullani(
        lambda t: 1 / (1 + t), taylor=(-1.0, 1.0, -1.0, 1.0), decay=1.0
    )
    assert abs(res.value + EULER_GAMMA) <= 1e-10


@pytest.mark.parametrize("mode", ["plain", "taylor", "minus_one"])
def test_frullani_half_power(mode):
    g = lambda t: (1 + 2 * t) ** -0.5
    kw = {"decay": 0.5}
    if mode == "taylor":
        kw["taylor"] = (-1.0, 1.5, -2.5, 4.375)
    elif mode == "minus_one":
        kw["g_minus_one"] = lambda t: math.expm1(-0.5 * math.log1p(2 * t))
    res = quad.integrate_frullani(g, **kw)
    assert abs(res.value - (-EULER_GAMMA - LN2)) <= 1e-10


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(0.2, 5.0), min_size=2, max_size=4))
def test_frullani_factor_order_independent(rates):
    def make(order):
        return lambda t: math.prod((1 + t / order[i]) ** -0.5 for i in range(len(order)))

    a = quad.integrate_frullani(make(rates), decay=0.5 * len(rates)).value
    b = quad.integrate_frullani(make(rates[::-1]), decay=0.5 * len(rates)).value
    assert abs(a - b) <= 1e-12 * max(1.0, abs(a))


@settings(max_examples=20, deadline=None)
@given(st.floats(0.2, 6.0), st.floats(0.1, 10.0))
def test_frullani_gamma_family(shape, rate):
    # int (e^-t - (1 + t/b)^-p) dt/t = psi(p) - ln b
    res = quad.integrate_frullani(
        lambda t: math.exp(-shape * math.log1p(t / rate)),
        g_minus_one=lambda t: math.expm1(-shape * math.log1p(t / rate)),
        decay=shape,
    )
    assert abs(res.value - (special.digamma(shape) - math.log(rate))) <= 1e-9


def test_frullani_cutoff_validation():
    with pytest.raises(DomainError):
        quad.integrate_frullani(lambda t: math.exp(-t), cutoff=0.5)
    with pytest.raises(DomainError):
        quad.integrate_frullani(lambda t: math.exp(-t), decay=-1.0)


def test_beta_log_values():
    assert quad.integrate_beta_log(1.0, 1.0, 0.0).value == 0.0
    res = quad.integrate_beta_log(1.0, 1.0, 0.5)
    assert abs(res.value - (LN2 - 1)) <= 1e-10
    res = quad.integrate_beta_log(0.5, 0.5, 0.9)
    assert abs(res.value - BETA_LOG_HALF_HALF) <= 1e-10
    assert res.est_abs_error <= 1e-10


def test_beta_log_midpoint_oracle():
    # Brute-force midpoint rule after x = sin^2(theta), which removes both endpoint singularities.
    n = 10**6
    theta = (np.arange(n) + 0.5) * (math.pi / 2) / n
    brute = 2 * np.sum(np.log1p(-0.9 * np.sin(theta) ** 2)) * (math.pi / 2) / n
    assert abs(quad.integrate_beta_log(0.5, 0.5, 0.9).value - brute) <= 1e-9


def test_beta_log_domain():
    with pytest.raises(DomainError):
        quad.integrate_beta_log(1.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        quad.integrate_beta_log(0.0, 1.0, 0.5)


def test_logdensity_examples():
    res = quad.integrate_logdensity(lambda t: math.exp(-t), (0.0, math.inf), 1.0)
    assert abs(res.value + EULER_GAMMA) <= 1e-8
    k = 2.5
    gamma_pdf = lambda t: math.exp((k - 1) * math.log(t) - t - math.lgamma(k)) if t > 0 else 0.0
    res = quad.integrate_logdensity(gamma_pdf, (0.0, math.inf), 1.0, points=(k,))
    assert abs(res.value - special.digamma(k)) <= 1e-8
    s = 1e-3
    narrow = lambda t: math.exp(-0.5 * ((t - 2.0) / s) ** 2) / (s * math.sqrt(2 * math.pi))
    res = quad.integrate_logdensity(narrow, (1.9, 2.1), 2.0, points=(2.0 - 5 * s, 2.0 + 5 * s))
    assert abs(res.value) <= 1e-4


def test_logdensity_normalisation_error():
    with pytest.raises(NormalizationError):
        quad.integrate_logdensity(lambda t: 2 * math.exp(-t), (0.0, math.inf), 1.0)


def test_logdensity_bad_scale():
    with pytest.raises(DomainError):
        quad.integrate_logdensity(lambda t: math.exp(-t), (0.0, math.inf), 0.0)


EXAMPLES = [
    lambda limit: quad.integrate_frullani(lambda t: math.exp(-2 * t), limit=limit, tol=1.0),
    lambda limit: quad.integrate_frullani(lambda t: 1 / (1 + t), decay=1.0, limit=limit, tol=1.0),
    lambda limit: quad.integrate_frullani(lambda t: (1 + 2 * t) ** -0.5, decay=0.5, limit=limit, tol=1.0),
    lambda limit: quad.integrate_beta_log(1.0, 1.0, 0.5, limit=limit, tol=1.0),
    lambda limit: quad.integrate_beta_log(0.5, 0.5, 0.9, limit=limit, tol=1.0),
    lambda limit: quad.integrate_logdensity(lambda t: math.exp(-t), (0.0, math.inf), 1.0, limit=limit, tol=1.0),
]


@pytest.mark.parametrize("call", EXAMPLES)
def test_doubling_budget_never_increases_error(call):
    errors = [call(limit).est_abs_error for limit in (4, 8, 16, 32, 64, 128)]
    assert all(b <= a for a, b in zip(errors, errors[1:]))


@pytest.mark.parametrize("p, q", [(0.5, 2.5), (5.0, 15.0), (40.0, 120.0), (300.0, 100.0)])
def test_beta_log_normalized(p, q):
    # Direct scipy oracle on the Beta density; the raw weight underflows for large p, q.
    from scipy import integrate, stats

    want = integrate.quad(lambda x: stats.beta.pdf(x, p, q) * math.log1p(-0.5 * x), 0, 1, epsabs=1e-14, limit=500)[0]
    got = quad.integrate_beta_log(p, q, 0.5, normalized=True).value
    assert abs(got - want) <= 1e-10
