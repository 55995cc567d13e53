import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from isolyap import exact
from isolyap.ensembles import EnsembleSpec
from isolyap.errors import DivergentMomentError, DomainError
from isolyap.specfun import EULER_GAMMA

LN2 = math.log(2.0)
# 1/2 <log(x1 + x2)> with x_i ~ Beta(1/2, 1), mpmath 2-D quadrature at 30 digits.
MU1_BETAI_N2 = -0.368028246322579021
HALF_E1_ONE = 0.109691967197760137

betas = st.sampled_from([1, 2, 4])


def gaussian_specs():
    return st.builds(
        lambda n, beta, data: EnsembleSpec.gaussian(n, beta, data[:n]),
        st.integers(1, 4),
        betas,
        st.lists(st.floats(0.3, 3.0), min_size=4, max_size=4),
    )


def beta1_specs():
    return st.builds(
        lambda n, beta, data: EnsembleSpec.beta1(n, beta, data[:n]),
        st.integers(1, 4),
        betas,
        st.lists(st.floats(0.1, 5.0), min_size=4, max_size=4),
    )


def beta2_specs():
    return st.builds(
        lambda n, beta, data: EnsembleSpec.beta2(n, beta, data[:n]),
        st.integers(1, 4),
        betas,
        st.lists(st.floats(4.5, 20.0), min_size=4, max_size=4),
    )


any_spec = st.one_of(gaussian_specs(), beta1_specs(), beta2_specs())


# --- determinant moments -----------------------------------------------------


def test_det_moment_examples():
    assert abs(exact.det_moment(EnsembleSpec.gaussian(2, 1, 1.0), 1) - 2.0) <= 1e-12
    assert abs(exact.det_moment(EnsembleSpec.beta1(1, 1, 1.0), 1) - 0.5) <= 1e-12
    for spec in (EnsembleSpec.gaussian(3, 4, 0.3), EnsembleSpec.beta2(2, 1, 0.5)):
        assert exact.det_moment(spec, 0) == 1.0


def test_det_moment_quadrature_oracle():
    # N = 1, beta = 1, nu = 1: density of x on (-1, 1) proportional to (1 - x^2)^(-1/2).
    from scipy import integrate

    num = integrate.quad(lambda x: x * x / math.sqrt(1 - x * x), -1, 1)[0]
    den = integrate.quad(lambda x: 1 / math.sqrt(1 - x * x), -1, 1)[0]
    assert abs(exact.det_moment(EnsembleSpec.beta1(1, 1, 1.0), 1) - num / den) <= 1e-9


def test_det_moment_divergence():
    with pytest.raises(DivergentMomentError):
        exact.det_moment(EnsembleSpec.beta2(2, 2, [3.0, 1.0]), 1.0)
    with pytest.raises(DivergentMomentError):
        exact.det_moment(EnsembleSpec.gaussian(2, 1), -0.5)


def test_det_distribution_gaussian_factors():
    d = exact.det_distribution(EnsembleSpec.gaussian(2, 1, 1.0))
    assert [(f.kind, f.a) for f in d.factors] == [("chisq", 1.0), ("chisq", 2.0)]
    assert abs(d.moment(1) - 2.0) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(any_spec, st.sampled_from([-0.2, 0.3, 1.0, 1.7, 2.0]))
def test_moment_factorization_coherence(spec, alpha):
    a = exact.det_moment(spec, alpha)
    b = exact.det_distribution(spec).moment(alpha)
    assert abs(a - b) <= 1e-12 * max(1.0, abs(a))


@settings(max_examples=30, deadline=None)
@given(any_spec)
def test_factorization_mean_log_is_lyapunov_sum(spec):
    a = exact.det_distribution(spec).mean_log_abs_det()
    assert abs(a - exact.lyapunov_sum(spec)) <= 1e-12


def test_gram_limit():
    n = 4
    d = exact.det_distribution(EnsembleSpec.beta1(n, 1, 1e-12))
    for l, f in enumerate(d.factors, start=1):
        assert f.kind == "beta"
        assert abs(f.a - (n - l + 1) / 2) <= 1e-12
        if l > 1:
            assert abs(f.b - (l - 1) / 2) <= 1e-11


def test_factor_sampling_matches_moment():
    d = exact.det_distribution(EnsembleSpec.beta2(2, 2, [6.0, 8.0]))
    x = d.sample(np.random.default_rng(3), 10**5)
    se = x.std() / math.sqrt(x.size)
    assert abs(x.mean() - d.moment(1)) <= 4 * se


# --- Lyapunov sums -------------------------------------------------------------


def test_lyapunov_sum_examples():
    assert abs(exact.lyapunov_sum(EnsembleSpec.gaussian(1, 1, 1.0)) + (EULER_GAMMA + LN2) / 2) <= 1e-12
    assert abs(exact.lyapunov_sum(EnsembleSpec.beta2(1, 2, 2.0)) + 0.5) <= 1e-12
    for beta in (1, 2, 4):
        for nu in (0.1, 1.0, 7.0):
            assert exact.lyapunov_sum(EnsembleSpec.beta1(1, beta, nu)) < 0


def test_partial_sums():
    assert abs(exact.lyapunov_partial_sum_gaussian(1, 1, 1, 1.0) + 0.6351814227307391) <= 1e-12
    mu = exact.gaussian_spectrum(2, 2, 1.0)
    assert abs(mu[0] - 0.5 * (LN2 + 1 - EULER_GAMMA)) <= 1e-12
    assert abs(mu[1] - 0.5 * (LN2 - EULER_GAMMA)) <= 1e-12
    assert abs(exact.lyapunov_partial_sum_gaussian(2, 1, 2, 1.0) - mu[0]) <= 1e-12
    with pytest.raises(ValueError):
        exact.lyapunov_partial_sum_gaussian(2, 3, 1, 1.0)


@given(st.integers(1, 8), betas, st.floats(0.1, 5.0))
def test_partial_sum_full_rank_equals_sum(n, beta, sigma):
    a = exact.lyapunov_partial_sum_gaussian(n, n, beta, sigma)
    b = exact.lyapunov_sum(EnsembleSpec.gaussian(n, beta, sigma))
    assert abs(a - b) <= 1e-12 * max(1.0, abs(b))


@given(st.integers(1, 8), betas)
def test_gaussian_spectrum_is_ordered(n, beta):
    mu = exact.gaussian_spectrum(n, beta)
    assert all(a >= b for a, b in zip(mu, mu[1:]))


# --- largest exponent, Gaussian rows --------------------------------------------


def test_mu1_gaussian_examples():
    assert abs(exact.mu1_gaussian_general([0.5], 1) + (EULER_GAMMA + LN2) / 2) <= 1e-10
    assert abs(exact.mu1_gaussian_general([1.0, 1.0], 2) - 0.5 * (1 - EULER_GAMMA)) <= 1e-10


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 6), betas, st.floats(0.05, 20.0))
def test_mu1_gaussian_equal_rates(n, beta, b):
    want = 0.5 * (special.digamma(beta * n / 2) - math.log(b))
    assert abs(exact.mu1_gaussian_general([b] * n, beta) - want) <= 1e-9


def test_two_block_examples():
    for n0 in (0, 1, 3):
        s = exact.TwoBlockGaussianSpec(3, n0, 2.0, 2.0, 2)
        assert abs(exact.mu1_gaussian_two_block(s) - 0.5 * (special.digamma(3.0) - math.log(2.0))) <= 1e-12
    s = exact.TwoBlockGaussianSpec(2, 1, 2.0, 1.0, 1)
    assert abs(exact.mu1_gaussian_two_block(s) - exact.mu1_gaussian_general([2.0, 1.0], 1)) <= 1e-8
    s = exact.TwoBlockGaussianSpec(4, 4, 3.0, 1.0, 1)
    assert abs(exact.mu1_gaussian_two_block(s) - exact.mu1_gaussian_general([3.0] * 4, 1)) <= 1e-10
    with pytest.raises(ValueError):
        exact.TwoBlockGaussianSpec(2, 1, 1.0, 2.0)


def test_two_block_derivative_of_moment():
    s = exact.TwoBlockGaussianSpec(3, 1, 2.5, 0.7, 1)
    h = 1e-4
    fd = (math.log(exact.moment_two_block(s, h)) - math.log(exact.moment_two_block(s, -h))) / (2 * h)
    assert abs(exact.mu1_gaussian_two_block(s) - 0.5 * fd) <= 1e-6


def test_two_block_moment_limits():
    s = exact.TwoBlockGaussianSpec(3, 2, 2.0, 0.5, 2)
    assert exact.moment_two_block(s, 0.0) == pytest.approx(1.0, abs=1e-14)
    s0 = exact.TwoBlockGaussianSpec(3, 0, 2.0, 0.5, 2)
    want = math.exp(special.gammaln(3 + 1.3) - special.gammaln(3)) * 0.5**-1.3
    assert abs(exact.moment_two_block(s0, 1.3) - want) <= 1e-10 * want
    big = exact.TwoBlockGaussianSpec(5, 2, 1e8, 0.5, 1)
    reduced = math.exp(special.gammaln(1.5 + 0.7) - special.gammaln(1.5)) * 0.5**-0.7
    assert abs(exact.moment_two_block(big, 0.7) - reduced) <= 1e-5
    with pytest.raises(DomainError):
        exact.moment_two_block(s, -4.0)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.data(), st.floats(0.1, 10.0), st.floats(0.05, 1.0), betas)
def test_two_block_route_equivalence(n, data, b1, ratio, beta):
    n0 = data.draw(st.integers(0, n))
    s = exact.TwoBlockGaussianSpec(n, n0, b1, b1 * ratio, beta)
    assert abs(exact.mu1_gaussian_two_block(s) - exact.mu1_gaussian_general(s.rates(), beta)) <= 1e-8


# --- beta rows ---------------------------------------------------------------------


def test_mu1_betaI_examples():
    assert abs(exact.mu1_betaI([1e-9], 2, 1)) <= 1e-8
    assert abs(exact.mu1_betaI([1.0], 1, 1) + LN2) <= 1e-10
    assert abs(exact.mu1_betaI([1.0, 1.0], 1, 2) - MU1_BETAI_N2) <= 1e-10


def test_mu1_betaI_warns_for_many_rows():
    with pytest.warns(exact.PrecisionWarning):
        exact.mu1_betaI([1.0] * 8, 1, 8)


@settings(max_examples=20, deadline=None)
@given(betas, st.floats(0.01, 30.0))
def test_n1_coherence_betaI(beta, nu):
    a = exact.mu1_betaI([nu], beta, 1)
    assert abs(a - exact.lyapunov_sum(EnsembleSpec.beta1(1, beta, nu))) <= 1e-8


@settings(max_examples=20, deadline=None)
@given(betas, st.floats(0.2, 50.0))
def test_n1_coherence_betaII(beta, omega):
    a = exact.mu1_betaII([omega], beta, 1)
    assert abs(a - exact.lyapunov_sum(EnsembleSpec.beta2(1, beta, omega))) <= 1e-8


@settings(max_examples=20, deadline=None)
@given(betas, st.floats(0.1, 10.0))
def test_n1_coherence_gaussian(beta, sigma):
    a = exact.mu1_gaussian_general([1 / (2 * sigma**2)], beta)
    assert abs(a - exact.lyapunov_sum(EnsembleSpec.gaussian(1, beta, sigma))) <= 1e-8


def test_mu1_betaII_examples():
    assert abs(exact.mu1_betaII([2.0], 2, 1) + 0.5) <= 1e-10
    big = 1e6
    rates = [1.0, 0.4, 2.5]
    reclaimed = 2 * exact.mu1_betaII([2 * b * big for b in rates], 1, 3) + math.log(big)
    assert abs(reclaimed - 2 * exact.mu1_gaussian_general(rates, 1)) <= 1e-4


def test_fourier_series_pieces():
    c0 = exact.fourier_coefficient([1.0, 1.0], 1, 2, 0)
    assert c0 == pytest.approx(0.5)
    head = 0.5 * (c0 * exact._log_fourier_integral(0, 2.0)).real
    assert abs(head - 0.5 * (math.log(2.0) - 1)) <= 1e-14
    for j in (1, 7, 40):
        a = exact.fourier_coefficient([0.5, 2.0], 2, 2, j)
        b = exact.fourier_coefficient([0.5, 2.0], 2, 2, -j)
        assert abs(a - b.conjugate()) <= 1e-14


def test_fourier_agrees_with_integral():
    res = exact.mu1_betaI_fourier([1.0, 1.0], 1, 2, n_terms=2000, full_output=True)
    assert abs(res.value - MU1_BETAI_N2) <= 1e-4
    assert abs(res.value - MU1_BETAI_N2) <= 10 * res.est_abs_error
    assert res.tail_correction == pytest.approx(res.value - res.raw_value)


def test_fourier_slow_decay_warning():
    with pytest.warns(exact.SlowDecayWarning):
        exact.mu1_betaI_fourier([1.0, 1.0], 1, 2, n_terms=20)


# --- shifted ensemble ----------------------------------------------------------------


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0, 5.0])
def test_shifted_real_2x2(lam):
    assert abs(exact.mu1_shifted(2, 1, lam) - exact.mu1_shifted_2x2(lam / 2)) <= 1e-8


def test_shifted_2x2_values():
    assert abs(exact.mu1_shifted_2x2(1.0) - HALF_E1_ONE) <= 1e-15
    assert 0 < exact.mu1_shifted_2x2(50.0) < 1e-20
    assert abs(exact.mu1_shifted_2x2(1e-6) - 0.5 * (-EULER_GAMMA + 6 * math.log(10))) <= 1e-5
    with pytest.raises(DomainError):
        exact.mu1_shifted_2x2(0.0)


def test_shifted_large_lambda():
    for beta, n in ((1, 1), (1, 3), (2, 2), (4, 2)):
        lam = 5000.0
        lead = exact.lyap_sum_shifted_asymptotic(n, 1, beta, 1.0, math.sqrt(lam))
        got = exact.mu1_shifted(n, beta, lam)
        assert abs(got - lead) <= 0.02 * abs(lead) + 1e-12


def test_shifted_asymptotic_monotone():
    gaps = [
        abs(exact.mu1_shifted(3, 1, lam) - exact.lyap_sum_shifted_asymptotic(3, 1, 1, 1.0, math.sqrt(lam)))
        for lam in (50.0, 500.0, 5000.0)
    ]
    assert gaps[0] > gaps[1] > gaps[2]


def test_shifted_sum_asymptotic_examples():
    assert exact.lyap_sum_shifted_asymptotic(4, 4, 2, 1.0, 3.0) == 0.0
    assert exact.lyap_sum_shifted_asymptotic(5, 4, 1, 1.0, 3.0) == 0.0
    assert exact.lyap_sum_shifted_asymptotic(1, 1, 1, 1.0, 10.0) == pytest.approx(-0.005, abs=1e-15)
    with pytest.raises(DomainError):
        exact.lyap_sum_shifted_asymptotic(1, 1, 1, 1.0, 0.0)


# --- asymptotic forms ---------------------------------------------------------------


def test_asymptotic_a1_equal_rates():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", exact.RegimeWarning)
        got = exact.mu1_asymptotic("a1", n=6, n0=2, b1=1.5, b2=1.5, beta=2)
    assert abs(got - 0.5 * (special.digamma(6.0) - math.log(1.5))) <= 1e-14


@given(st.integers(20, 200), st.data(), st.floats(0.1, 10.0), st.floats(0.01, 1.0), betas)
def test_asymptotic_a2_equals_trace_form(n, data, b1, ratio, beta):
    n0 = data.draw(st.integers(0, n))
    kw = dict(n=n, n0=n0, b1=b1, b2=b1 * ratio, beta=beta)
    assert abs(exact.mu1_asymptotic("a2", **kw) - exact.mu1_asymptotic("a2a", **kw)) <= 1e-12


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_asymptotic_a3_kargin(t):
    n = 12
    got = exact.mu1_asymptotic("a3", n=n, b1=n / 2, b2=t / 2, beta=1)
    assert abs(got - exact.kargin_limit(t)) <= 1e-6


def test_asymptotic_a1_approaches_quadrature():
    gaps = []
    for n in (20, 80, 320):
        s = exact.TwoBlockGaussianSpec(n, n // 4, 2.0, 1.0, 1)
        gaps.append(abs(exact.mu1_asymptotic("a1", n=n, n0=n // 4, b1=2.0, b2=1.0, beta=1) - exact.mu1_gaussian_two_block(s)))
    assert gaps[0] > gaps[1] > gaps[2]


def test_asymptotic_beta_variants_approach_exact():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        g1 = [abs(exact.mu1_betaI([1.0] * n, 1, n) - exact.mu1_asymptotic("betaI_largeN", nu=[1.0] * n, beta=1)) for n in (10, 20, 40)]
        g2 = [abs(exact.mu1_betaII([5.0] * n, 1, n) - exact.mu1_asymptotic("betaII_largeN", omega=[5.0] * n, beta=1)) for n in (10, 20, 40)]
    assert g1[0] > g1[1] > g1[2] and g1[2] < 0.02
    assert g2[0] > g2[1] > g2[2] and g2[2] < 0.05


def test_asymptotic_regime_warning_and_errors():
    with pytest.warns(exact.RegimeWarning):
        exact.mu1_asymptotic("a2", n=4, n0=1, b1=2.0, b2=1.0, beta=1)
    with pytest.raises(DomainError):
        exact.mu1_asymptotic("betaII_largeN", omega=[1.0] * 30, beta=1)
    with pytest.raises(ValueError):
        exact.mu1_asymptotic("b7")


def test_mu1_dispatch_and_result():
    spec = EnsembleSpec.gaussian(2, 1, 1.0)
    res = exact.mu1(spec, full_output=True)
    assert res.method == "quadrature" and res.est_abs_error <= 1e-10
    assert res.value == exact.mu1(spec)
