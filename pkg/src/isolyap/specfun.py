"""Scalar special functions used by the closed-form evaluators.

Gamma-family functions are thin, domain-checked wrappers over
:mod:`scipy.special`.  The confluent functions ``1F1`` and ``U`` and the
Gauss function ``2F1`` are evaluated here: scipy's ``hyperu`` is only good
to about 1e-7 relative and its ``hyp1f1`` does not cover large imaginary
arguments, both of which the Lyapunov-exponent formulas need.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from .errors import ConvergenceError, DomainError

EULER_GAMMA = 0.57721566490153286061

_EPS = 2.220446049250313e-16
_MAX_SERIES_TERMS = 20000


@dataclass(frozen=True)
class SpecFunResult:
    value: float | complex
    est_abs_error: float


def _is_nonpositive_integer(x):
    return x <= 0 and float(x).is_integer()


def log_gamma(x):
    """ln Gamma(x) for x > 0."""
    if not x > 0:
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    return float(special.gammaln(x))


def digamma(x):
    """Psi(x) = d/dx ln Gamma(x) for x > 0."""
    if not x > 0:
        raise DomainError(f"digamma requires x > 0, got {x!r}")
    return float(special.psi(x))


def pochhammer(c, n):
    """Gamma(c + n) / Gamma(c) for real n, through log-gamma differences."""
    if not c > 0 or not c + n > 0:
        raise DomainError(f"pochhammer({c!r}, {n!r}) needs c > 0 and c + n > 0")
    if n == 0:
        return 1.0
    return math.exp(log_gamma(c + n) - log_gamma(c))


# ---------------------------------------------------------------------------
# Confluent hypergeometric 1F1


def _series_1f1(a, b, z):
    """Power series; exact (terminating) when a is a non-positive integer."""
    total = 1.0 + 0.0 * z
    term = 1.0 + 0.0 * z
    small = 0
    for k in range(_MAX_SERIES_TERMS):
        term = term * (a + k) / (b + k) * z / (k + 1)
        total = total + term
        if term == 0:
            return total, k + 1
        if abs(term) <= _EPS * abs(total):
            small += 1
            if small >= 2 and k > abs(a) and k > abs(z):
                return total, k + 1
        else:
            small = 0
    raise ConvergenceError("1F1 power series did not converge", total, _MAX_SERIES_TERMS)


def _asymptotic_sum(p, q, w, tol=_EPS):
    """Sum_s (p)_s (q)_s / s! * w**s until terms stop shrinking.

    Returns (sum, last_term_magnitude); the caller decides whether the
    smallest term is small enough.
    """
    total = 1.0 + 0.0 * w
    term = 1.0 + 0.0 * w
    last = 1.0
    for s in range(200):
        nxt = term * (p + s) * (q + s) / (s + 1) * w
        if abs(nxt) >= abs(term) and s > 0:
            return total, abs(term)
        term = nxt
        total = total + term
        last = abs(term)
        if term == 0 or last <= tol * abs(total):
            return total, last
    return total, last


def _asymptotic_1f1(a, b, z):
    """Large-|z| expansion; returns (value, relative error estimate)."""
    zc = complex(z)
    sign = 1.0 if zc.imag >= 0 else -1.0
    s1, e1 = _asymptotic_sum(a, a - b + 1.0, -1.0 / zc)
    rg_ba = special.rgamma(b - a)
    rg_a = special.rgamma(a)
    lead1 = np.exp(sign * 1j * math.pi * a) * zc ** (-a) * rg_ba
    if zc.real < -700.0:
        # The exponentially small branch underflows; drop it.
        s2, e2, lead2 = 0.0, 0.0, 0.0
    else:
        s2, e2 = _asymptotic_sum(1.0 - a, b - a, 1.0 / zc)
        lead2 = np.exp(zc) * zc ** (a - b) * rg_a
    t1 = lead1 * s1
    t2 = lead2 * s2
    gb = special.gamma(b)
    value = gb * (t1 + t2)
    scale = abs(gb) * (abs(lead1) + abs(lead2))
    err = abs(gb) * (abs(lead1) * e1 + abs(lead2) * e2)
    return value, err / max(abs(value), 1e-300), scale


@lru_cache(maxsize=64)
def _jacobi_rule(n, alpha, beta):
    return special.roots_jacobi(n, alpha, beta)


def _jacobi_1f1(a, b, z):
    """Euler integral of 1F1 by Gauss-Jacobi quadrature (needs b > a > 0).

    The integrand exp(z u) is entire, so a rule with a few more nodes than
    |z| is exact to rounding.
    """
    n = 40 + int(1.2 * abs(z))
    x, w = _jacobi_rule(n, b - a - 1.0, a - 1.0)
    u = 0.5 * (1.0 + x)
    s = np.sum(w * np.exp(z * u))
    log_norm = (
        special.gammaln(b) - special.gammaln(a) - special.gammaln(b - a) + (1.0 - b) * math.log(2.0)
    )
    return s * math.exp(log_norm)


def kummer_1f1(a, b, x, full_output=False):
    """Confluent hypergeometric 1F1(a; b; x).

    ``x`` may be real or complex; for complex input only the imaginary axis
    is in contract.  Real input returns a float, complex input a complex.
    Negative real arguments go through the Kummer transform
    ``1F1(a; b; x) = e**x 1F1(b - a; b; -x)`` so the series has no
    cancellation.
    """
    if _is_nonpositive_integer(b):
        raise DomainError(f"1F1 undefined for b = {b!r}")
    if isinstance(x, complex) or np.iscomplexobj(x):
        value, err = _kummer_complex(a, b, complex(x))
    else:
        value, err = _kummer_real(a, b, float(x))
    if full_output:
        return SpecFunResult(value, err)
    return value


def _kummer_real(a, b, x):
    if x == 0:
        return 1.0, 0.0
    if _is_nonpositive_integer(a):
        val, n = _series_1f1(a, b, x)
        return float(val), n * _EPS * abs(val)
    if x < 0:
        if _is_nonpositive_integer(b - a):
            val, n = _series_1f1(b - a, b, -x)
            val = math.exp(x) * val
            return float(val), n * _EPS * abs(val)
        if -x > 30.0:
            val, rel, _ = _asymptotic_1f1(a, b, x)
            if rel < 1e-15:
                val = float(val.real)
                return val, 4 * _EPS * abs(val)
        if -x > 700.0:
            # Only the algebraic branch survives; form it in logs so huge |x| underflows cleanly.
            s1, last = _asymptotic_sum(a, a - b + 1.0, 1.0 / x)
            if last > 1e-15 * abs(s1):
                raise ConvergenceError(f"1F1({a}, {b}, {x}) out of range", None, 0)
            log_mag = special.gammaln(b) - special.gammaln(b - a) - a * math.log(-x)
            val = special.gammasgn(b) * special.gammasgn(b - a) * math.exp(log_mag) * s1
            return float(val), 4 * _EPS * abs(val)
        val, n = _series_1f1(b - a, b, -x)
        val = math.exp(x) * val
        return float(val), 4 * n * _EPS * abs(val)
    if x > 30.0:
        val, rel, _ = _asymptotic_1f1(a, b, x)
        if rel < 1e-15:
            val = float(val.real)
            return val, 4 * _EPS * abs(val)
    val, n = _series_1f1(a, b, x)
    return float(val), 4 * n * _EPS * abs(val)


def _kummer_complex(a, b, z):
    if abs(z.real) > 1e-12 * max(1.0, abs(z)):
        raise DomainError("complex 1F1 is only supported on the imaginary axis")
    z = complex(0.0, z.imag)
    if z == 0:
        return complex(1.0), 0.0
    if abs(z) <= 2.0 or _is_nonpositive_integer(a):
        val, n = _series_1f1(a, b, z)
        return complex(val), 4 * n * _EPS * abs(val)
    if abs(z) > 25.0:
        val, rel, scale = _asymptotic_1f1(a, b, z)
        if rel < 1e-14:
            return complex(val), 8 * _EPS * scale + rel * abs(val)
    if b > a > 0:
        val = _jacobi_1f1(a, b, z)
        return complex(val), 1e2 * _EPS * max(1.0, abs(val))
    val, n = _series_1f1(a, b, z)
    # Oscillating series: the largest term bounds the rounding loss.
    bound = math.exp(abs(z)) * _EPS
    return complex(val), bound


# ---------------------------------------------------------------------------
# Tricomi U


def _tricomi_asymptotic(a, b, x):
    s, last = _asymptotic_sum(a, a - b + 1.0, -1.0 / x)
    return x ** (-a) * s, last


def tricomi_u(a, b, x, full_output=False):
    """Confluent hypergeometric function of the second kind U(a, b; x).

    Evaluated from ``U = Gamma(a)**-1 * int_0^inf e^{-xt} t^{a-1}
    (1+t)^{b-a-1} dt`` by quadrature, or from its large-x expansion when
    that converges to rounding.
    """
    if not a > 0:
        raise DomainError(f"tricomi_u requires a > 0, got {a!r}")
    if not x > 0:
        raise DomainError(f"tricomi_u requires x > 0, got {x!r}")
    if x > 25.0:
        val, last = _tricomi_asymptotic(a, b, x)
        if last <= 4 * _EPS * abs(val):
            val = float(val)
            return SpecFunResult(val, 4 * _EPS * abs(val)) if full_output else val
    val, err = _tricomi_quadrature(a, b, x)
    return SpecFunResult(val, err) if full_output else val


def _tricomi_quadrature(a, b, x):
    c = b - a - 1.0
    # [0, 1]: algebraic weight t^(a-1) handled exactly by QAWS, on a first
    # piece short enough to resolve the e^{-xt} decay.
    split = min(1.0, 50.0 / x)
    head, e_head = integrate.quad(
        lambda t: math.exp(-x * t) * (1.0 + t) ** c,
        0.0,
        split,
        weight="alg",
        wvar=(a - 1.0, 0.0),
        epsabs=0.0,
        epsrel=1e-13,
        limit=200,
    )
    if split < 1.0:
        more, e_more = integrate.quad(
            lambda t: math.exp(-x * t + (a - 1.0) * math.log(t)) * (1.0 + t) ** c,
            split,
            1.0,
            epsabs=1e-15 * abs(head),
            epsrel=1e-13,
            limit=200,
        )
        head, e_head = head + more, e_head + e_more
    # [1, inf): t = e^s; the exponential cutoff sits near s = -ln x.
    def tail_integrand(s):
        t = math.exp(s)
        return math.exp(-x * t + a * s) * (1.0 + t) ** c

    s_cut = max(0.0, -math.log(x))
    s_end = s_cut + math.log(40.0 + 40.0 * abs(a) + 40.0 * abs(c)) + 2.0
    tail, e_tail = integrate.quad(
        tail_integrand,
        0.0,
        s_end,
        points=[s_cut] if 0.0 < s_cut < s_end else None,
        epsabs=0.0,
        epsrel=1e-13,
        limit=400,
    )
    log_ga = special.gammaln(a)
    val = (head + tail) * math.exp(-log_ga)
    err = (e_head + e_tail) * math.exp(-log_ga) + 8 * _EPS * abs(val)
    return float(val), float(err)


# ---------------------------------------------------------------------------
# Gauss 2F1


def _series_2f1(a, b, c, z):
    total = 1.0
    term = 1.0
    for k in range(_MAX_SERIES_TERMS):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        total += term
        if term == 0 or (abs(term) <= _EPS * abs(total) and k > 2):
            return total, k + 1
    raise ConvergenceError("2F1 series did not converge", total, _MAX_SERIES_TERMS)


def _euler_2f1(a, b, c, z):
    """1/B(b, c-b) int_0^1 t^(b-1) (1-t)^(c-b-1) (1 - z t)^(-a) dt."""
    val, err = integrate.quad(
        lambda t: (1.0 - z * t) ** (-a),
        0.0,
        1.0,
        weight="alg",
        wvar=(b - 1.0, c - b - 1.0),
        epsabs=0.0,
        epsrel=1e-13,
        limit=200,
    )
    norm = math.exp(special.gammaln(c) - special.gammaln(b) - special.gammaln(c - b))
    return val * norm, err * norm


def gauss_2f1(a, b, c, z, full_output=False):
    """Gauss hypergeometric 2F1(a, b; c; z) for real z < 1.

    Series for |z| <= 1/2, the Euler integral otherwise (after a Pfaff
    transform when z < -1).
    """
    if not c > 0:
        raise DomainError(f"gauss_2f1 requires c > 0, got {c!r}")
    if not z < 1:
        raise DomainError(f"gauss_2f1 requires z < 1, got {z!r}")
    val, err = _gauss_2f1(float(a), float(b), float(c), float(z))
    return SpecFunResult(val, err) if full_output else val


def _gauss_2f1(a, b, c, z):
    if a == 0 or b == 0 or z == 0:
        return 1.0, 0.0
    if abs(z) <= 0.5 or _is_nonpositive_integer(a) or _is_nonpositive_integer(b):
        val, n = _series_2f1(a, b, c, z)
        return val, 4 * n * _EPS * abs(val)
    if z < -1.0:
        # Pfaff: (1-z)^(-a) 2F1(a, c-b; c; z/(z-1)), new argument in (1/2, 1).
        val, err = _gauss_2f1(a, c - b, c, z / (z - 1.0))
        f = (1.0 - z) ** (-a)
        return val * f, err * f
    for p, q in ((b, a), (a, b)):
        if 0 < p < c:
            return _euler_2f1(q, p, c, z)
    if z < 0:
        val, err = _gauss_2f1(a, c - b, c, z / (z - 1.0))
        f = (1.0 - z) ** (-a)
        return val * f, err * f
    raise DomainError(f"no convergent representation for 2F1({a}, {b}; {c}; {z})")


# ---------------------------------------------------------------------------
# Bessel and exponential integral


def bessel_i_scaled(nu, x):
    """exp(-x) I_nu(x) for x >= 0 and nu > -1."""
    if not x >= 0:
        raise DomainError(f"bessel_i_scaled requires x >= 0, got {x!r}")
    if not nu > -1:
        raise DomainError(f"bessel_i_scaled requires nu > -1, got {nu!r}")
    if x == 0:
        if nu == 0:
            return 1.0
        if nu > 0:
            return 0.0
        raise DomainError("I_nu(0) is infinite for -1 < nu < 0")
    return float(special.ive(nu, x))


def exp_e1(x):
    """Exponential integral E1(x) = int_x^inf e^{-u}/u du for x > 0."""
    if not x > 0:
        raise DomainError(f"exp_e1 requires x > 0, got {x!r}")
    return float(special.exp1(x))
