"""Hypergeometric functions of a scalar matrix argument t * I_m.

The series runs over partitions kappa,

    pFq(a; b; t I_m) = sum_kappa [a]_kappa / [b]_kappa * C_kappa(I_m) t^|kappa| / |kappa|!

with Jack parameter ``alpha_jack = 2 / beta`` and C_kappa the Jack polynomial
in "C" normalisation, for which sum_{|kappa| = k} C_kappa(X) = (tr X)^k.  At
the identity C_kappa has a closed hook-length product, so no polynomial is
ever expanded.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

from .errors import DomainError
from .specfun import pochhammer


class TruncationWarning(UserWarning):
    """The retained partition weights leave a tail above the requested tolerance."""


class Partition(tuple):
    """Non-increasing tuple of positive parts."""

    def __new__(cls, parts=()):
        parts = tuple(int(p) for p in parts)
        if any(p <= 0 for p in parts) or any(x < y for x, y in zip(parts, parts[1:])):
            raise ValueError(f"not a partition: {parts}")
        return super().__new__(cls, parts)

    @property
    def weight(self):
        return sum(self)

    def conjugate(self):
        if not self:
            return Partition()
        return Partition(sum(1 for p in self if p > j) for j in range(self[0]))

    def __repr__(self):
        return f"Partition({tuple(self)})"


def _partitions_of(weight, max_parts, largest):
    if weight == 0:
        yield ()
        return
    if max_parts == 0:
        return
    for first in range(min(weight, largest), 0, -1):
        for rest in _partitions_of(weight - first, max_parts - 1, first):
            yield (first,) + rest


@lru_cache(maxsize=256)
def _partitions_cached(max_weight, max_parts):
    out = []
    for w in range(max_weight + 1):
        out.extend(Partition(p) for p in _partitions_of(w, max_parts, w))
    return tuple(out)


def enumerate_partitions(max_weight, max_parts=None):
    """Every partition of weight <= max_weight with at most max_parts parts.

    Ordered by weight, then reverse-lexicographically within a weight.
    """
    if max_weight < 0:
        raise ValueError("max_weight must be non-negative")
    if max_parts is None:
        max_parts = max_weight
    return list(_partitions_cached(int(max_weight), int(max_parts)))


def gen_pochhammer(a, kappa, alpha_jack):
    """[a]_kappa = prod_i (a - (i-1)/alpha)_{kappa_i}, by explicit products.

    Exact zeros survive, which is what makes terminating series terminate.
    """
    out = 1.0
    for i, part in enumerate(kappa):
        base = a - i / alpha_jack
        for j in range(part):
            out *= base + j
    return out


def jack_c_identity(kappa, m, alpha_jack):
    """C_kappa^(alpha)(I_m) from the hook-length product formula."""
    kappa = Partition(kappa)
    if len(kappa) > m:
        return 0.0
    k = kappa.weight
    conj = kappa.conjugate()
    content = 1.0
    hooks = 1.0
    for i, part in enumerate(kappa):
        for j in range(part):
            arm = part - j - 1
            leg = conj[j] - i - 1
            content *= m - i + alpha_jack * j
            hooks *= (leg + alpha_jack * (arm + 1)) * (leg + 1 + alpha_jack * arm)
    return alpha_jack**k * math.factorial(k) * content / hooks


@dataclass(frozen=True)
class MhgParams:
    """Arguments of a scalar-argument matrix hypergeometric function.

    For 1F1, ``a`` is the numerator and ``b`` the denominator parameter; for
    2F0 both are numerators.
    """

    alpha_jack: float
    a: float
    b: float
    t: float
    m: int
    max_weight: int = 30

    def __post_init__(self):
        if self.alpha_jack not in (2.0, 1.0, 0.5):
            raise ValueError(f"alpha_jack must be 2, 1 or 1/2, got {self.alpha_jack!r}")
        if self.max_weight < 0:
            raise ValueError("max_weight must be non-negative")
        if self.m < 1:
            raise ValueError("matrix dimension m must be positive")

    @classmethod
    def for_beta(cls, beta, a, b, t, m, max_weight=30):
        return cls(2.0 / beta, a, b, t, m, max_weight)


@dataclass(frozen=True)
class MhgResult:
    value: float
    tail: float
    max_weight: int
    terminated: bool = False


def _weight_blocks(p, numerator, denominator, max_weight):
    """Sum of series terms grouped by weight, for weights 0..max_weight."""
    blocks = [0.0] * (max_weight + 1)
    for kappa in enumerate_partitions(max_weight, p.m):
        coeff = 1.0
        for a in numerator:
            coeff *= gen_pochhammer(a, kappa, p.alpha_jack)
        if coeff == 0.0:
            continue
        for b in denominator:
            den = gen_pochhammer(b, kappa, p.alpha_jack)
            if den == 0.0:
                raise DomainError(f"denominator parameter {b} hits a zero of [b]_{tuple(kappa)}")
            coeff /= den
        w = kappa.weight
        blocks[w] += coeff * jack_c_identity(kappa, p.m, p.alpha_jack) * p.t**w / math.factorial(w)
    return blocks


def _terminating_order(a, m):
    if a <= 0 and float(a).is_integer():
        return int(-a) * m
    return None


def mhg_1f1_scalar(p: MhgParams, tol=1e-14) -> MhgResult:
    """1F1^(alpha)(a; b; t I_m).

    When a is a non-positive integer -n the series is a polynomial of degree
    m n; that is checked by evaluating one weight beyond it and requiring an
    exact zero.  Otherwise weights are added until two consecutive blocks
    fall below ``tol`` relative to the sum, or ``max_weight`` is reached.
    """
    order = _terminating_order(p.a, p.m)
    if order is not None:
        blocks = _weight_blocks(p, (p.a,), (p.b,), order + 1)
        if blocks[-1] != 0.0:
            raise AssertionError("terminating series left a non-zero block past its degree")
        return MhgResult(math.fsum(blocks), 0.0, order, terminated=True)
    blocks = _weight_blocks(p, (p.a,), (p.b,), p.max_weight)
    total = 0.0
    quiet = 0
    used = p.max_weight
    for w, blk in enumerate(blocks):
        total += blk
        if w > 0 and abs(blk) <= tol * abs(total):
            quiet += 1
            if quiet == 2:
                used = w
                break
        else:
            quiet = 0
    tail = abs(blocks[used]) if used == p.max_weight else 0.0
    if tail > tol * max(abs(total), 1.0):
        warnings.warn(
            f"1F1 series truncated at weight {p.max_weight} with last block {tail:.2e}",
            TruncationWarning,
            stacklevel=2,
        )
    return MhgResult(total, tail, used)


def mhg_2f0_scalar(p: MhgParams) -> MhgResult:
    """Partial sum of the (generally divergent) 2F0^(alpha)(a, b; ; t I_m).

    All weights up to ``max_weight`` are kept; ``tail`` is the size of the
    first omitted weight block.
    """
    blocks = _weight_blocks(p, (p.a, p.b), (), p.max_weight + 1)
    return MhgResult(math.fsum(blocks[:-1]), abs(blocks[-1]), p.max_weight)


def _gaussian_prefactor(n, k, beta, sigma, alpha):
    out = 1.0
    for l in range(1, k + 1):
        out *= (2.0 * sigma * sigma) ** alpha * pochhammer(beta * (n - l + 1) / 2.0, alpha)
    return out


def noncentral_wishart_det_moment(n, k, beta, sigma, c, alpha, max_weight=30):
    """<(det W_k)^alpha> for W_k = Y_k^dagger Y_k, Y = c I_N + X.

    Y_k holds the first k columns and X has i.i.d. N[0, sigma] components.
    Quaternion determinants follow the Prod r_jj^2 convention.
    """
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    pref = _gaussian_prefactor(n, k, beta, sigma, alpha)
    if c == 0 or alpha == 0:
        return pref
    ctilde = c * c / (2.0 * sigma * sigma)
    p = MhgParams.for_beta(beta, -alpha, beta * n / 2.0, -ctilde, k, max_weight)
    return pref * mhg_1f1_scalar(p).value


def noncentral_wishart_det_moment_kummer(n, k, beta, sigma, c, alpha, max_weight=30):
    """Same moment through e^{-k ctilde} 1F1(alpha + beta N/2; beta N/2; ctilde I_k)."""
    pref = _gaussian_prefactor(n, k, beta, sigma, alpha)
    ctilde = c * c / (2.0 * sigma * sigma)
    p = MhgParams.for_beta(beta, alpha + beta * n / 2.0, beta * n / 2.0, ctilde, k, max_weight)
    return pref * math.exp(-k * ctilde) * mhg_1f1_scalar(p).value


def wishart_asymptotic_series(n, k, beta, sigma, c, alpha, max_weight=1):
    """Large-c partial sum 2F0(1 - alpha - beta(N-k+1)/2, -alpha; ; I_k / ctilde).

    Approximates <det(W_k / c^2)^alpha>; for k = N this is the moment of
    |det(I + X/c)|^(2 alpha).
    """
    ctilde = c * c / (2.0 * sigma * sigma)
    p = MhgParams.for_beta(
        beta, 1.0 - alpha - beta * (n - k + 1) / 2.0, -alpha, 1.0 / ctilde, k, max_weight
    )
    return mhg_2f0_scalar(p)
