"""Closed-form and single-integral evaluators for determinant moments and Lyapunov exponents.

Conventions: beta in {1, 2, 4} counts real components per entry, rates are
b = 1 / (2 sigma^2), and every exponent is in nats per factor of the
product.  Quaternion determinants are Prod r_jj (the square root of the
determinant of the 2N x 2N complex embedding).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import quad
from .ensembles import BetaI, BetaII, EnsembleSpec, Gaussian, ShiftedGaussianSpec, as_field
from .errors import DivergentMomentError, DomainError
from .specfun import (
    EULER_GAMMA,
    bessel_i_scaled,
    digamma,
    exp_e1,
    gauss_2f1,
    kummer_1f1,
    log_gamma,
    pochhammer,
    tricomi_u,
)


class PrecisionWarning(UserWarning):
    """A quadrature result is less accurate than the package's default target."""


class RegimeWarning(UserWarning):
    """An asymptotic formula is being used outside its natural regime."""


@dataclass(frozen=True)
class LyapunovResult:
    values: tuple
    method: str
    est_abs_error: float = 0.0

    @property
    def value(self):
        return self.values[-1]


def _finish(value, method, err, full_output):
    if full_output:
        return LyapunovResult((float(value),), method, float(err))
    return float(value)


# ---------------------------------------------------------------------------
# Determinant distribution


@dataclass(frozen=True)
class Factor:
    """One independent factor ``scale * Y`` of |det X|^2.

    kind is "chisq" (Y ~ chi^2 with ``a`` degrees of freedom), "beta"
    (Y ~ Beta(a, b)) or "betaprime" (Y ~ BetaPrime(a, b)).
    """

    kind: str
    a: float
    b: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in ("chisq", "beta", "betaprime"):
            raise ValueError(f"unknown factor kind {self.kind!r}")
        if not self.a > 0 or (self.kind != "chisq" and not self.b > 0) or not self.scale > 0:
            raise DomainError(f"degenerate factor {self}")

    def log_moment(self, alpha):
        """log <(scale Y)^alpha>, +inf where the moment diverges."""
        s = alpha * math.log(self.scale)
        if self.kind == "chisq":
            h = self.a / 2.0
            if h + alpha <= 0:
                return math.inf
            return s + alpha * math.log(2.0) + log_gamma(h + alpha) - log_gamma(h)
        if self.a + alpha <= 0:
            return math.inf
        if self.kind == "beta":
            return s + log_gamma(self.a + alpha) - log_gamma(self.a) + log_gamma(
                self.a + self.b
            ) - log_gamma(self.a + self.b + alpha)
        if self.b - alpha <= 0:
            return math.inf
        return s + log_gamma(self.a + alpha) - log_gamma(self.a) + log_gamma(
            self.b - alpha
        ) - log_gamma(self.b)

    def mean_log(self):
        """<log(scale Y)>."""
        s = math.log(self.scale)
        if self.kind == "chisq":
            return s + math.log(2.0) + digamma(self.a / 2.0)
        if self.kind == "beta":
            return s + digamma(self.a) - digamma(self.a + self.b)
        return s + digamma(self.a) - digamma(self.b)

    def sample(self, rng, size=None):
        if self.kind == "chisq":
            y = rng.chisquare(self.a, size)
        elif self.kind == "beta":
            y = rng.beta(self.a, self.b, size)
        else:
            y = rng.beta(self.a, self.b, size)
            y = y / (1.0 - y)
        return self.scale * y


@dataclass(frozen=True)
class DistributionFactorization:
    """|det X|^2 in law as a product of independent scaled factors."""

    factors: tuple

    def moment(self, alpha):
        """<|det X|^(2 alpha)> computed factor by factor."""
        total = sum(f.log_moment(alpha) for f in self.factors)
        return math.exp(total)

    def mean_log_abs_det(self):
        return 0.5 * sum(f.mean_log() for f in self.factors)

    def sample(self, rng, size=None):
        out = 1.0
        for f in self.factors:
            out = out * f.sample(rng, size)
        return out


def det_distribution(spec: EnsembleSpec) -> DistributionFactorization:
    beta, n = spec.beta, spec.n
    p = spec.params
    if spec.kind == "gaussian":
        factors = [Factor("chisq", beta * l, scale=p[l - 1] ** 2) for l in range(1, n + 1)]
    elif spec.kind == "beta1":
        factors = [
            Factor("beta", beta * (n - l + 1) / 2.0, beta * (p[l - 1] + l - 1) / 2.0)
            for l in range(1, n + 1)
        ]
    else:
        factors = [
            Factor("betaprime", beta * (n - l + 1) / 2.0, beta * p[l - 1] / 2.0)
            for l in range(1, n + 1)
        ]
    return DistributionFactorization(tuple(factors))


def det_moment(spec: EnsembleSpec, alpha) -> float:
    """<|det X|^(2 alpha)> for the three isotropic row weights."""
    if alpha == 0:
        return 1.0
    beta, n = spec.beta, spec.n
    p = spec.params
    if not alpha > -beta / 2.0:
        raise DivergentMomentError(f"moment of order alpha={alpha} needs alpha > -beta/2")
    out = 0.0
    for l in range(1, n + 1):
        head = beta * (n - l + 1) / 2.0
        if spec.kind == "gaussian":
            out += alpha * math.log(2.0 * p[l - 1] ** 2) + math.log(pochhammer(head, alpha))
        elif spec.kind == "beta1":
            out += math.log(pochhammer(head, alpha)) - math.log(
                pochhammer(beta * (n + p[l - 1]) / 2.0, alpha)
            )
        else:
            tail = beta * p[l - 1] / 2.0
            if not alpha < tail:
                raise DivergentMomentError(
                    f"beta type II moment diverges for alpha={alpha} >= beta*omega/2={tail}"
                )
            out += math.log(pochhammer(head, alpha)) + math.log(pochhammer(tail, -alpha))
    return math.exp(out)


# ---------------------------------------------------------------------------
# Sums of Lyapunov exponents


def lyapunov_sum(spec: EnsembleSpec) -> float:
    """mu_1 + ... + mu_N = <log |det X|>."""
    if not isinstance(spec, EnsembleSpec):
        raise TypeError("closed-form sum only exists for the isotropic row ensembles")
    beta, n = spec.beta, spec.n
    p = spec.params
    total = 0.0
    for l in range(1, n + 1):
        head = digamma(beta * (n - l + 1) / 2.0)
        if spec.kind == "gaussian":
            total += math.log(2.0 * p[l - 1] ** 2) + head
        elif spec.kind == "beta1":
            total += head - digamma(beta * (n + p[l - 1]) / 2.0)
        else:
            total += head - digamma(beta * p[l - 1] / 2.0)
    return 0.5 * total


def lyapunov_partial_sum_gaussian(n, k, beta, sigma) -> float:
    """mu_1 + ... + mu_k for i.i.d. N[0, sigma] components."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    beta = as_field(beta)
    psi = sum(digamma(beta * (n - l + 1) / 2.0) for l in range(1, k + 1))
    return 0.5 * (k * math.log(2.0 * sigma * sigma) + psi)


def gaussian_spectrum(n, beta, sigma=1.0):
    """Individual exponents mu_1 >= ... >= mu_N of the i.i.d. Gaussian product."""
    beta = as_field(beta)
    return [
        0.5 * (math.log(2.0 * sigma * sigma) + digamma(beta * (n - l + 1) / 2.0))
        for l in range(1, n + 1)
    ]


def lyap_sum_shifted_asymptotic(n, k, beta, sigma, c) -> float:
    """Leading large-c value of mu_1 + ... + mu_k for products of I + X/c."""
    if c == 0:
        raise DomainError("c must be non-zero")
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    return sigma * sigma * k * (beta * (n - k + 1) / 2.0 - 1.0) / (c * c)


# ---------------------------------------------------------------------------
# Largest exponent, Gaussian rows


def _rates(b):
    rates = np.atleast_1d(np.asarray(b, dtype=float))
    if np.any(rates <= 0):
        raise DomainError("all rates b_l = 1/(2 sigma_l^2) must be positive")
    return rates


def mu1_gaussian_general(b, beta, full_output=False):
    """Largest exponent for independent Gaussian rows with rates b_l.

    2 mu_1 = int_0^inf (e^{-t} - prod_l (1 + t/b_l)^(-beta/2)) dt/t.
    """
    rates = _rates(b)
    beta = as_field(beta)
    half = beta / 2.0

    def log_g(t):
        return -half * math.fsum(math.log1p(t / r) for r in rates)

    res = quad.integrate_frullani(
        lambda t: math.exp(log_g(t)),
        g_minus_one=lambda t: math.expm1(log_g(t)),
        decay=half * len(rates),
    )
    return _finish(0.5 * res.value, "quadrature", 0.5 * res.est_abs_error, full_output)


@dataclass(frozen=True)
class TwoBlockGaussianSpec:
    """N rows, the first n0 with rate b1 and the remaining N - n0 with rate b2 <= b1."""

    n: int
    n0: int
    b1: float
    b2: float
    beta: int = 1

    def __post_init__(self):
        object.__setattr__(self, "beta", as_field(self.beta))
        if not 0 <= self.n0 <= self.n or self.n < 1:
            raise ValueError(f"need 0 <= n0 <= n, got n0={self.n0}, n={self.n}")
        if not (self.b1 > 0 and self.b2 > 0):
            raise DomainError("rates must be positive")
        if self.b2 > self.b1:
            raise ValueError(f"rows must be ordered with b2 <= b1 (got b1={self.b1}, b2={self.b2})")

    def rates(self):
        return [self.b1] * self.n0 + [self.b2] * (self.n - self.n0)

    def as_ensemble(self):
        sigmas = [math.sqrt(1.0 / (2.0 * b)) for b in self.rates()]
        return EnsembleSpec.gaussian(self.n, self.beta, sigmas)


def mu1_gaussian_two_block(spec: TwoBlockGaussianSpec, full_output=False):
    """Largest exponent for two blocks of Gaussian rows via a Beta-weighted log integral."""
    beta, n, n0 = spec.beta, spec.n, spec.n0
    base = digamma(beta * n / 2.0)
    if n0 == 0:
        return _finish(0.5 * (base - math.log(spec.b2)), "closed-form", 0.0, full_output)
    if n0 == n:
        return _finish(0.5 * (base - math.log(spec.b1)), "closed-form", 0.0, full_output)
    p, q = beta * n0 / 2.0, beta * (n - n0) / 2.0
    res = quad.integrate_beta_log(p, q, 1.0 - spec.b2 / spec.b1, normalized=True)
    value = 0.5 * (base - math.log(spec.b2) + res.value)
    return _finish(value, "quadrature", 0.5 * res.est_abs_error, full_output)


def moment_two_block(spec: TwoBlockGaussianSpec, s) -> float:
    """<S^s> for S the squared norm of one column of the two-block Gaussian matrix."""
    half_n = spec.beta * spec.n / 2.0
    if not half_n + s > 0:
        raise DomainError(f"moment of order s={s} needs beta N/2 + s > 0")
    ratio = pochhammer(half_n, s)
    hyp = gauss_2f1(spec.beta * spec.n0 / 2.0, -s, half_n, 1.0 - spec.b2 / spec.b1)
    return ratio * spec.b2 ** (-s) * hyp


# ---------------------------------------------------------------------------
# Largest exponent, beta rows


def _broadcast_params(values, n):
    return np.broadcast_to(np.asarray(values, dtype=float), (n,)).copy()


def _poly_mul(p, q, degree):
    out = [0.0] * (degree + 1)
    for i, x in enumerate(p):
        for j, y in enumerate(q):
            if i + j <= degree:
                out[i + j] += x * y
    return out


def mu1_betaI(nu, beta, n, full_output=False):
    """Largest exponent for beta type I rows.

    2 mu_1 = int_0^inf (e^{-t} - prod_l 1F1(beta/2; beta/2 + a_l; -t)) dt/t,
    a_l = beta (N + nu_l - 1) / 2.
    """
    beta = as_field(beta)
    nus = _broadcast_params(nu, n)
    if np.any(nus <= 0):
        raise DomainError("nu_l must be positive")
    a = beta / 2.0
    # Rows with equal nu share a factor.
    distinct, counts = np.unique(nus, return_counts=True)
    bs = [a + beta * (n + v - 1) / 2.0 for v in distinct]

    def g(t):
        out = 1.0
        for b, m in zip(bs, counts):
            out *= kummer_1f1(a, b, -t) ** m
        return out

    poly = [1.0]
    for b, m in zip(bs, counts):
        series = [1.0]
        for k in range(1, 5):
            series.append(series[-1] * (a + k - 1) / (b + k - 1) * (-1.0) / k)
        for _ in range(m):
            poly = _poly_mul(poly, series, 4)
    res = quad.integrate_frullani(g, taylor=tuple(poly[1:5]), decay=a * n)
    if n > 6 or res.est_abs_error > 1e-8:
        warnings.warn(
            f"beta type I integrand for N={n} reached only ~{res.est_abs_error:.1e} accuracy",
            PrecisionWarning,
            stacklevel=2,
        )
    return _finish(0.5 * res.value, "quadrature", 0.5 * res.est_abs_error, full_output)


def fourier_coefficient(nu, beta, n, index):
    """c_j = (1/(beta N)) prod_l 1F1(beta/2; beta/2 + a_l; -2 pi i j / (beta N))."""
    beta = as_field(beta)
    nus = _broadcast_params(nu, n)
    length = beta * n
    z = complex(0.0, -2.0 * math.pi * index / length)
    out = complex(1.0 / length)
    for v in nus:
        out *= kummer_1f1(beta / 2.0, beta / 2.0 + beta * (n + v - 1) / 2.0, z)
    return out


def _log_fourier_integral(index, length):
    """int_0^L log(x) exp(2 pi i j x / L) dx."""
    if index == 0:
        return complex(length * math.log(length) - length)
    j = abs(index)
    k = 2.0 * math.pi * j / length
    si, ci = special.sici(2.0 * math.pi * j)
    inner = complex(ci - EULER_GAMMA - math.log(2.0 * math.pi * j), si)
    val = -inner / complex(0.0, k)
    return val if index > 0 else val.conjugate()


@dataclass(frozen=True)
class FourierSeriesResult:
    value: float
    raw_value: float
    tail_correction: float
    est_abs_error: float
    n_terms: int


class SlowDecayWarning(UserWarning):
    """The truncated Fourier series still has a large tail."""


def mu1_betaI_fourier(nu, beta, n, n_terms=2000, full_output=False):
    """Largest exponent for beta type I rows from the Fourier series of the column density.

    The symmetric partial sum over |j| <= n_terms converges like log(M)/M, so
    the returned value adds a tail extrapolated from the partial sums over
    the last decade of terms (fit S_M = S + (p log M + q)/M + (r log M + s)/M^2).
    ``raw_value`` is the plain truncated sum.
    """
    if n_terms < 1:
        raise ValueError("n_terms must be at least 1")
    beta = as_field(beta)
    length = beta * n
    c0 = fourier_coefficient(nu, beta, n, 0)
    head = 0.5 * (c0 * _log_fourier_integral(0, length)).real
    terms = np.array(
        [
            (fourier_coefficient(nu, beta, n, j) * _log_fourier_integral(j, length)).real
            for j in range(1, n_terms + 1)
        ]
    )
    partial = head + np.cumsum(terms)
    raw = float(partial[-1])
    lo = max(1, n_terms // 10)
    if n_terms - lo < 10:
        value, err = raw, float(abs(terms[-1]) * n_terms)
    else:
        m = np.arange(lo, n_terms + 1, dtype=float)
        y = partial[lo - 1 :]
        lm = np.log(m)
        design = np.stack([np.ones_like(m), lm / m, 1 / m, lm / m**2, 1 / m**2], axis=1)
        full, *_ = np.linalg.lstsq(design, y, rcond=None)
        short, *_ = np.linalg.lstsq(design[:, :3], y, rcond=None)
        value = float(full[0])
        err = float(abs(full[0] - short[0]))
    if abs(value - raw) > 1e-3:
        warnings.warn(
            f"Fourier tail {abs(value - raw):.1e} after {n_terms} terms", SlowDecayWarning, stacklevel=2
        )
    if full_output:
        return FourierSeriesResult(value, raw, value - raw, err, n_terms)
    return value


def mu1_betaII(omega, beta, n, full_output=False):
    """Largest exponent for beta type II rows.

    2 mu_1 = int_0^inf (e^{-t} - prod_l G_l U(beta/2, 1 - beta omega_l/2; t)) dt/t,
    G_l = Gamma((beta omega_l + beta)/2) / Gamma(beta omega_l / 2).
    """
    beta = as_field(beta)
    oms = _broadcast_params(omega, n)
    if np.any(oms <= 0):
        raise DomainError("omega_l must be positive")
    a = beta / 2.0
    distinct, counts = np.unique(oms, return_counts=True)
    pars = [
        (1.0 - beta * w / 2.0, math.exp(log_gamma(beta * (w + 1) / 2.0) - log_gamma(beta * w / 2.0)))
        for w in distinct
    ]

    def g(t):
        out = 1.0
        for (b, pref), m in zip(pars, counts):
            out *= (pref * tricomi_u(a, b, t)) ** m
        return out

    # Near 0, 1 - g(t) ~ K t^p (possibly times a log) with p = min(1, beta omega/2):
    # neither expansion helps, so the piece below a cutoff is bounded and dropped.
    p = 0.9 * min(1.0, beta * float(oms.min()) / 2.0)
    probe = 1e-6
    k = 10.0 * abs(math.exp(-probe) - g(probe)) / probe**p + 1e-300
    cutoff = min(1e-9, max(1e-300, (1e-13 * p / k) ** (1.0 / p)))
    # Each factor behaves like t^(-beta/2) at infinity.
    res = quad.integrate_frullani(g, decay=a * n, cutoff=cutoff)
    return _finish(0.5 * res.value, "quadrature", 0.5 * res.est_abs_error, full_output)


# ---------------------------------------------------------------------------
# Largest exponent, shifted Gaussian products


def noncentral_chi2_pdf(t, dof, lam):
    """Density of the noncentral chi^2 law, with a scaled Bessel function."""
    if t <= 0:
        return 0.0
    root = math.sqrt(t)
    nu = dof / 2.0 - 1.0
    return (
        0.5
        * math.exp(-0.5 * (root - math.sqrt(lam)) ** 2)
        * (t / lam) ** (dof / 4.0 - 0.5)
        * bessel_i_scaled(nu, math.sqrt(lam * t))
    )


def mu1_shifted(n, beta, lam, full_output=False):
    """Largest exponent for products of I_N + X/c with lam = (c/sigma)^2.

    mu_1 = (1/2) <log(T / lam)> with T noncentral chi^2, beta N degrees of
    freedom and noncentrality lam.
    """
    if not lam > 0:
        raise DomainError("noncentrality lam must be positive")
    beta = as_field(beta)
    dof = beta * n
    spread = 2.0 * math.sqrt(lam + dof / 2.0) + 2.0 * math.sqrt(dof)
    centre = lam + dof
    points = [p for p in (centre - 8 * spread, centre, centre + 8 * spread) if p > 0]
    res = quad.integrate_logdensity(
        lambda t: noncentral_chi2_pdf(t, dof, lam), (0.0, math.inf), lam, points=points, tol=1e-9
    )
    return _finish(0.5 * res.value, "quadrature", 0.5 * res.est_abs_error, full_output)


def mu1_shifted_2x2(ctilde, full_output=False):
    """Largest exponent for 2x2 real products of I + X/c, taking ctilde = c^2/(2 sigma^2)."""
    if not ctilde > 0:
        raise DomainError("ctilde must be positive")
    return _finish(0.5 * exp_e1(ctilde), "closed-form", 0.0, full_output)


def mu1(spec, full_output=False):
    """Largest exponent for any supported spec, dispatching on its type."""
    if isinstance(spec, ShiftedGaussianSpec):
        return mu1_shifted(spec.n, spec.beta, spec.lam, full_output)
    p = spec.params
    if spec.kind == "gaussian":
        return mu1_gaussian_general(1.0 / (2.0 * p**2), spec.beta, full_output)
    if spec.kind == "beta1":
        return mu1_betaI(p, spec.beta, spec.n, full_output)
    return mu1_betaII(p, spec.beta, spec.n, full_output)


# ---------------------------------------------------------------------------
# Asymptotic forms


def _regime(ok, message):
    if not ok:
        warnings.warn(message, RegimeWarning, stacklevel=3)


def mu1_asymptotic(variant, **params):
    """Large-N approximations of the largest exponent.

    variant   parameters
    a1        n, n0, b1, b2, beta      N -> inf with n0/N and b2/b1 fixed
    a2        n, n0, b1, b2, beta      ... and b1, b2 proportional to N
    a2a       rates (list) , beta      (1/2) log(beta Tr Sigma)
    a3        n, b1, b2, beta          n0 = N - 1, b1 ~ N, b2 fixed
    betaI_largeN   nu (list), beta
    betaII_largeN  omega (list), beta
    """
    beta = as_field(params.get("beta", 1))
    if variant in ("a1", "a2"):
        n, n0, b1, b2 = params["n"], params["n0"], params["b1"], params["b2"]
        _regime(b2 <= b1, "rows should be ordered with b2 <= b1")
        _regime(n >= 20, f"large-N formula evaluated at N={n}")
        if variant == "a1":
            return 0.5 * (
                digamma(beta * n / 2.0) - math.log(b2) + math.log1p(-(1.0 - b2 / b1) * n0 / n)
            )
        return 0.5 * math.log(beta / 2.0 * ((n - n0) / b2 + n0 / b1))
    if variant == "a2a":
        if "rates" in params:
            rates = _rates(params["rates"])
        else:
            rates = _rates(TwoBlockGaussianSpec(params["n"], params["n0"], params["b1"], params["b2"], beta).rates())
        _regime(len(rates) >= 20, f"large-N formula evaluated at N={len(rates)}")
        trace = float(np.sum(1.0 / (2.0 * rates)))
        return 0.5 * math.log(beta * trace)
    if variant == "a3":
        n, b1, b2 = params["n"], params["b1"], params["b2"]
        kappa = b1 / (n * b2)
        shape = beta / 2.0
        # <log(1 + kappa Y)>, Y ~ Gamma(beta/2, rate beta/2), as a log-moment of T = 1 + kappa Y.
        log_norm = shape * math.log(shape) - log_gamma(shape)

        def pdf(t):
            y = (t - 1.0) / kappa
            if y <= 0:
                return 0.0
            return math.exp(log_norm + (shape - 1.0) * math.log(y) - shape * y) / kappa

        res = quad.integrate_logdensity(pdf, (1.0, math.inf), 1.0, points=(1.0 + kappa,), tol=1e-10)
        return 0.5 * (math.log(beta * n / (2.0 * b1)) + res.value)
    if variant == "betaI_largeN":
        nus = np.atleast_1d(np.asarray(params["nu"], dtype=float))
        n = len(nus)
        _regime(n >= 20, f"large-N formula evaluated at N={n}")
        return 0.5 * math.log(float(np.sum(1.0 / (n + nus))))
    if variant == "betaII_largeN":
        oms = np.atleast_1d(np.asarray(params["omega"], dtype=float))
        if np.any(oms <= 2.0 / beta):
            raise DomainError("need omega > 2/beta for a finite mean column norm")
        _regime(len(oms) >= 20, f"large-N formula evaluated at N={len(oms)}")
        return 0.5 * math.log(float(np.sum(1.0 / (oms - 2.0 / beta))))
    raise ValueError(f"unknown asymptotic variant {variant!r}")


def kargin_limit(t):
    """(1/2) e^{t/2} int_1^inf e^{-t x/2} dx / (sqrt(x)(sqrt(x) + 1)), beta = 1."""
    from scipy import integrate

    val, _ = integrate.quad(
        lambda x: math.exp(-t * (x - 1.0) / 2.0) / (math.sqrt(x) * (math.sqrt(x) + 1.0)),
        1.0,
        math.inf,
        epsabs=1e-14,
        epsrel=1e-13,
        limit=400,
    )
    return 0.5 * val
