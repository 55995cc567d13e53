"""One-dimensional quadrature for the integral shapes met in the exponent formulas.

All routines sit on QUADPACK (:func:`scipy.integrate.quad`); what lives here
is the change of variables and the cancellation handling that make those
integrals reach ~1e-10 absolute accuracy.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import ConvergenceError, DomainError, NormalizationError


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    est_abs_error: float
    evaluations: int


class _Tally:
    """Accumulates QUADPACK pieces and their bookkeeping."""

    def __init__(self, what, tol, limit=400):
        self.what = what
        self.tol = tol
        self.limit = limit
        self.value = 0.0
        self.error = 0.0
        self.evaluations = 0

    def add(self, func, a, b, **kw):
        kw.setdefault("epsabs", 1e-13)
        kw.setdefault("epsrel", 1e-12)
        kw.setdefault("limit", self.limit)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            out = integrate.quad(func, a, b, full_output=1, **kw)
        val, err, info = out[0], out[1], out[2]
        self.value += val
        self.error += err
        self.evaluations += int(info.get("neval", 0)) if isinstance(info, dict) else 0
        # QUADPACK complaints (out[3]) only matter if the error is also large.
        if err > self.tol:
            reason = out[3].splitlines()[0] if len(out) > 3 else "error estimate too large"
            raise ConvergenceError(
                f"{self.what}: [{a}, {b}] err={err:.2e} > {self.tol:.1e} ({reason})",
                partial=self.value,
                terms=self.evaluations,
            )

    def result(self):
        if not math.isfinite(self.value):
            raise ConvergenceError(f"{self.what}: non-finite value", self.value, self.evaluations)
        return QuadratureResult(self.value, self.error, self.evaluations)


def _frullani_kernel(g, g_minus_one, taylor, threshold):
    if taylor is not None:
        coeffs = [(-1.0) ** k / math.factorial(k) - taylor[k - 1] for k in range(1, 5)]

    def h(t):
        if taylor is not None and t < threshold:
            return t * (coeffs[0] + t * (coeffs[1] + t * (coeffs[2] + t * coeffs[3])))
        if g_minus_one is not None and t < 1.0:
            return math.expm1(-t) - g_minus_one(t)
        return math.exp(-t) - g(t)

    return h


def integrate_frullani(
    g,
    *,
    g_minus_one=None,
    taylor=None,
    taylor_threshold=1e-3,
    decay=None,
    cutoff=None,
    tol=1e-10,
    limit=400,
):
    """int_0^inf (e^{-t} - g(t)) dt / t for g(0) = 1 and g decaying like t^-p.

    The substitution t = e^s turns the integral into one over the real line
    whose integrand falls off exponentially at both ends.  Near t = 0 the
    difference e^{-t} - g(t) is formed without cancellation when either

    * ``taylor = (g1, g2, g3, g4)``, the coefficients of g(t) = 1 + g1 t +
      ..., is given: below ``taylor_threshold`` the 4-term expansion of the
      difference is used; or
    * ``g_minus_one`` computes g(t) - 1 directly: it is combined with
      expm1(-t) for t < 1.

    ``limit`` is the QUADPACK subinterval budget per piece.  ``decay`` is the power p in g(t) = O(t^-p); very slow decay moves the
    right breakpoint out so the tail piece stays resolvable.

    ``cutoff`` drops (0, cutoff) from the range.  It is meant for integrands
    with non-analytic small-t behaviour (g(t) - 1 ~ t^p, p < 1), where
    neither expansion applies and the caller has bounded the dropped piece.
    """
    h = _frullani_kernel(g, g_minus_one, taylor, taylor_threshold)

    def f(s):
        # g(e^700) ~ e^(-700 p) is far below tolerance for any usable p.
        return h(math.exp(s)) if s < 700.0 else 0.0

    right = math.log(40.0)
    if decay is not None:
        if decay <= 0:
            raise DomainError("integrate_frullani needs g(t) = O(t^-p) with p > 0")
        right = max(right, min(40.0, 8.0 / decay))
    tally = _Tally("integrate_frullani", tol, limit)
    left = -np.inf
    if cutoff is not None:
        if not 0 < cutoff < math.exp(-8.0):
            raise DomainError(f"cutoff must lie in (0, e^-8), got {cutoff}")
        left = math.log(cutoff)
    tally.add(f, left, -8.0)
    tally.add(f, -8.0, right, points=[0.0] if right > 0 else None)
    tally.add(f, right, np.inf)
    return tally.result()


def integrate_beta_log(p, q, u, tol=1e-10, limit=400, normalized=False):
    """int_0^1 x^(p-1) (1-x)^(q-1) ln(1 - u x) dx.

    The algebraic endpoint factors are handled as a QUADPACK weight, so
    p, q < 1 cost nothing extra.  With ``normalized=True`` the weight is
    divided by B(p, q), i.e. the result is <ln(1 - u X)> for X ~ Beta(p, q).
    That form stays accurate when B(p, q) itself underflows the tolerance.
    """
    if not (p > 0 and q > 0):
        raise DomainError(f"integrate_beta_log needs p, q > 0 (got {p}, {q})")
    if not u < 1:
        raise DomainError(f"integrate_beta_log needs u < 1, got {u}")
    if u == 0:
        return QuadratureResult(0.0, 0.0, 1)
    log_b = math.lgamma(p) + math.lgamma(q) - math.lgamma(p + q)
    tally = _Tally("integrate_beta_log", tol, limit)
    if normalized and p >= 1 and q >= 1:
        # Smooth unimodal density: integrate it directly, anchored at the bulk.
        def f(x):
            if x <= 0.0 or x >= 1.0:
                return 0.0
            w = (p - 1) * math.log(x) + (q - 1) * math.log1p(-x) - log_b
            return math.exp(w) * math.log1p(-u * x)

        mean = p / (p + q)
        sd = math.sqrt(p * q / ((p + q) ** 2 * (p + q + 1)))
        cuts = sorted({0.0, 1.0, *[c for c in (mean + k * sd for k in (-12, -4, 0, 4, 12)) if 0 < c < 1]})
        for a, b in zip(cuts[:-1], cuts[1:]):
            tally.add(f, a, b)
        return tally.result()
    scale = math.exp(-log_b) if normalized else 1.0
    tally.add(
        lambda x: scale * math.log1p(-u * x),
        0.0,
        1.0,
        weight="alg",
        wvar=(p - 1.0, q - 1.0),
    )
    return tally.result()


def integrate_logdensity(pdf, support, scale, points=(), tol=1e-8, norm_tol=1e-8, limit=400):
    """int ln(t / scale) pdf(t) dt over ``support``.

    The range is split at ``scale`` (where the log changes sign) and at any
    extra ``points``, which is where narrow densities should be anchored.
    Raises :class:`NormalizationError` if pdf does not integrate to one
    within ``norm_tol``; quadrature trouble raises ConvergenceError instead.
    """
    if not scale > 0:
        raise DomainError("integrate_logdensity needs scale > 0")
    lo, hi = support
    cuts = sorted({lo, hi, *[c for c in (scale, *points) if lo < c < hi]})
    norm = _Tally("integrate_logdensity normalisation", tol, limit)
    tally = _Tally("integrate_logdensity", tol, limit)
    log_scale = math.log(scale)
    for a, b in zip(cuts[:-1], cuts[1:]):
        norm.add(pdf, a, b)
        tally.add(lambda t: (math.log(t) - log_scale) * pdf(t) if t > 0 else 0.0, a, b)
    total = norm.result().value
    if abs(total - 1.0) > norm_tol:
        raise NormalizationError(f"density integrates to {total!r}, not 1")
    res = tally.result()
    return QuadratureResult(res.value, res.est_abs_error, res.evaluations + norm.evaluations)
