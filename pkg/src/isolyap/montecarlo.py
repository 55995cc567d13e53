"""Monte-Carlo oracles: Lyapunov spectra of products, the column estimator of mu_1, determinant moments.

Every estimator splits its work into numbered units (trials or sample
blocks), each with its own stream derived from ``(master_seed, index)``, so
results do not depend on the order in which units are processed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ensembles import EnsembleSpec, ShiftedGaussianSpec, sample_first_column_norm_sq, sample_spec
from .errors import VarianceGateError

BLOCK = 50_000


def unit_rng(master_seed, index):
    """Independent stream for work unit ``index``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(master_seed), int(index)])))


@dataclass(frozen=True)
class MCEstimate:
    value: float
    std_error: float
    samples: int
    master_seed: int

    def z_score(self, target):
        if self.std_error == 0:
            return 0.0 if self.value == target else math.inf
        return (self.value - target) / self.std_error


def _estimate(values, samples, seed):
    values = np.asarray(values, dtype=float)
    se = float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0
    return MCEstimate(float(values.mean()), se, int(samples), int(seed))


@dataclass(frozen=True)
class SpectrumEstimate:
    """Per-trial Lyapunov exponents, sorted so the means are non-increasing."""

    per_trial: np.ndarray  # (trials, N)
    steps_per_trial: int
    master_seed: int
    embedding_per_trial: np.ndarray | None = field(default=None, repr=False)

    @property
    def trials(self):
        return self.per_trial.shape[0]

    @property
    def exponents(self):
        return [_estimate(col, self.trials, self.master_seed) for col in self.per_trial.T]

    def partial_sum(self, k):
        """mu_1 + ... + mu_k with its error from per-trial sums."""
        return _estimate(self.per_trial[:, :k].sum(axis=1), self.trials, self.master_seed)

    def total(self):
        return self.partial_sum(self.per_trial.shape[1])


def estimate_spectrum(spec, m, trials, master_seed, chunk=256) -> SpectrumEstimate:
    """Lyapunov spectrum of X_m ... X_1 by QR re-orthogonalisation at every step.

    The frame starts at the identity.  For beta = 4 the propagation runs on
    the 2N x 2N complex embedding, whose exponents come in equal pairs; each
    pair is averaged into one quaternion exponent.
    """
    if m < 1 or trials < 2:
        raise ValueError("need m >= 1 and trials >= 2")
    rngs = [unit_rng(master_seed, i) for i in range(trials)]
    beta = int(spec.beta)
    dim = 2 * spec.n if beta == 4 else spec.n
    dtype = float if beta == 1 else complex
    frame = np.broadcast_to(np.eye(dim, dtype=dtype), (trials, dim, dim)).copy()
    acc = np.zeros((trials, dim))
    done = 0
    while done < m:
        c = min(chunk, m - done)
        # Each trial draws its own block, so streams are consumed identically however trials are batched.
        block = np.stack([sample_spec(spec, rng, size=c).entries for rng in rngs], axis=1)
        for j in range(c):
            frame, r = np.linalg.qr(block[j] @ frame)
            acc += np.log(np.abs(np.diagonal(r, axis1=-2, axis2=-1)))
        done += c
    acc /= m
    embedding = None
    if beta == 4:
        embedding = acc
        acc = acc.reshape(trials, dim // 2, 2).mean(axis=2)
    order = np.argsort(-acc.mean(axis=0), kind="stable")
    if embedding is not None:
        embedding = embedding.reshape(trials, dim // 2, 2)[:, order, :].reshape(trials, dim)
    return SpectrumEstimate(acc[:, order], m, int(master_seed), embedding)


def _blocks(samples, block=BLOCK):
    start = 0
    index = 0
    while start < samples:
        size = min(block, samples - start)
        yield index, size
        start += size
        index += 1


def estimate_mu1_column(spec, samples, master_seed) -> MCEstimate:
    """mu_1 ~ (1/2M) sum log S_i with S the squared norm of the first column."""
    if samples < 100:
        raise ValueError("column estimator needs at least 100 samples")
    parts = [
        0.5 * np.log(sample_first_column_norm_sq(spec, unit_rng(master_seed, i), size))
        for i, size in _blocks(samples)
    ]
    return _estimate(np.concatenate(parts), samples, master_seed)


def variance_gate(spec, alpha):
    """Reject moment orders whose Monte-Carlo estimator would have infinite variance."""
    if isinstance(spec, EnsembleSpec) and spec.kind == "beta2":
        bound = spec.beta * float(np.min(spec.params)) / 2.0
        if not 2.0 * alpha < bound:
            raise VarianceGateError(
                f"alpha={alpha}: |det|^(2 alpha) has infinite variance unless 2 alpha < {bound}"
            )
    if not 2.0 * alpha > -spec.beta / 2.0:
        raise VarianceGateError(f"alpha={alpha}: negative moment too strong for a finite variance")


def log_det_gram(entries, beta, k):
    """log det(Y_k^dagger Y_k) for the first k columns, quaternion determinants as Prod r_jj^2."""
    cols = 2 * k if beta == 4 else k
    y = entries[..., :cols]
    gram = np.conj(np.swapaxes(y, -1, -2)) @ y
    _, logdet = np.linalg.slogdet(gram)
    return 0.5 * logdet if beta == 4 else logdet


def estimate_det_moment(spec, alpha, samples, master_seed, k=None) -> MCEstimate:
    """<det(X_k^dagger X_k)^alpha>; with k = N (default) this is <|det X|^(2 alpha)>."""
    if alpha == 0:
        return MCEstimate(1.0, 0.0, int(samples), int(master_seed))
    variance_gate(spec, alpha)
    n = spec.n
    k = n if k is None else k
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    parts = []
    for i, size in _blocks(samples):
        sample = sample_spec(spec, unit_rng(master_seed, i), size=size)
        if k == n:
            logdet = 2.0 * sample.log_abs_det()
        else:
            logdet = log_det_gram(sample.entries, int(spec.beta), k)
        parts.append(np.exp(alpha * logdet))
    return _estimate(np.concatenate(parts), samples, master_seed)


def estimate_wishart_moment(n, k, beta, sigma, c, alpha, samples, master_seed) -> MCEstimate:
    """<(det W_k)^alpha> for W_k from Y = c I_N + X, via the I + X/c sampler rescaled by c^(2 k alpha)."""
    if c == 0:
        spec = EnsembleSpec.gaussian(n, beta, sigma)
        return estimate_det_moment(spec, alpha, samples, master_seed, k=k)
    spec = ShiftedGaussianSpec(n, beta, c, sigma)
    raw = estimate_det_moment(spec, alpha, samples, master_seed, k=k)
    scale = abs(c) ** (2.0 * k * alpha)
    return MCEstimate(raw.value * scale, raw.std_error * scale, raw.samples, raw.master_seed)
