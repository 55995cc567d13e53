"""Isotropic row ensembles over the reals, complexes and quaternions.

A matrix entry over field index beta carries ``beta`` real components.
Samplers draw those components as a real array of shape ``(..., beta)``
and only convert to a field representation at the end; quaternion
matrices are always handed out as their 2N x 2N complex embedding with
2x2 blocks ``[[z, w], [-conj(w), conj(z)]]``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Union

import jsonschema
import numpy as np


class FieldIndex(IntEnum):
    REAL = 1
    COMPLEX = 2
    QUATERNION = 4


def as_field(beta) -> FieldIndex:
    try:
        return FieldIndex(int(beta))
    except ValueError:
        raise ValueError(f"beta must be one of 1, 2, 4, got {beta!r}") from None


# ---------------------------------------------------------------------------
# Row distributions


def _positive(name, value):
    value = float(value)
    if not value > 0 or not math.isfinite(value):
        raise ValueError(f"{name} must be a positive finite number, got {value!r}")
    return value


@dataclass(frozen=True)
class Gaussian:
    """Each real component N[0, sigma]."""

    sigma: float
    tag = "gaussian"

    def __post_init__(self):
        object.__setattr__(self, "sigma", _positive("sigma", self.sigma))

    def to_json(self):
        return {"type": "gaussian", "sigma": self.sigma}


@dataclass(frozen=True)
class BetaI:
    """Density proportional to (1 - |x|^2)^(beta nu / 2 - 1) on the unit ball."""

    nu: float
    tag = "beta1"

    def __post_init__(self):
        object.__setattr__(self, "nu", _positive("nu", self.nu))

    def to_json(self):
        return {"type": "beta1", "nu": self.nu}


@dataclass(frozen=True)
class BetaII:
    """Density proportional to (1 + |x|^2)^(-beta (n + omega) / 2)."""

    omega: float
    tag = "beta2"

    def __post_init__(self):
        object.__setattr__(self, "omega", _positive("omega", self.omega))

    def to_json(self):
        return {"type": "beta2", "omega": self.omega}


RowDistribution = Union[Gaussian, BetaI, BetaII]

_ROW_TYPES = {"gaussian": (Gaussian, "sigma"), "beta1": (BetaI, "nu"), "beta2": (BetaII, "omega")}


def row_from_json(obj) -> RowDistribution:
    cls, key = _ROW_TYPES[obj["type"]]
    return cls(obj[key])


# ---------------------------------------------------------------------------
# Matrix specs


@dataclass(frozen=True)
class EnsembleSpec:
    beta: FieldIndex
    n: int
    rows: tuple

    def __post_init__(self):
        object.__setattr__(self, "beta", as_field(self.beta))
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        rows = tuple(self.rows)
        if len(rows) != self.n:
            raise ValueError(f"expected {self.n} row distributions, got {len(rows)}")
        tags = {type(r) for r in rows}
        if len(tags) != 1:
            raise ValueError("all rows must share one distribution type")
        if not isinstance(rows[0], (Gaussian, BetaI, BetaII)):
            raise TypeError(f"unknown row distribution {rows[0]!r}")
        object.__setattr__(self, "rows", rows)

    @property
    def kind(self):
        return self.rows[0].tag

    @property
    def params(self):
        """Per-row sigma, nu or omega as a float array."""
        key = _ROW_TYPES[self.kind][1]
        return np.array([getattr(r, key) for r in self.rows], dtype=float)

    @classmethod
    def gaussian(cls, n, beta, sigma=1.0):
        return cls(beta, n, _broadcast(Gaussian, sigma, n))

    @classmethod
    def beta1(cls, n, beta, nu):
        return cls(beta, n, _broadcast(BetaI, nu, n))

    @classmethod
    def beta2(cls, n, beta, omega):
        return cls(beta, n, _broadcast(BetaII, omega, n))

    def to_json(self):
        return {"beta": int(self.beta), "n": self.n, "rows": [r.to_json() for r in self.rows]}


def _broadcast(cls, value, n):
    values = np.broadcast_to(np.asarray(value, dtype=float), (n,))
    return tuple(cls(float(v)) for v in values)


@dataclass(frozen=True)
class ShiftedGaussianSpec:
    """I_N + X / c with X having i.i.d. N[0, sigma] components."""

    n: int
    beta: FieldIndex
    c: float
    sigma: float = 1.0
    lam: float = field(init=False)
    ctilde: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "beta", as_field(self.beta))
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        c = float(self.c)
        if c == 0 or not math.isfinite(c):
            raise ValueError("shift parameter c must be finite and non-zero")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "sigma", _positive("sigma", self.sigma))
        lam = c * c / (self.sigma * self.sigma)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "ctilde", lam / 2)

    kind = "shifted"

    def to_json(self):
        return {"beta": int(self.beta), "n": self.n, "c": self.c, "sigma": self.sigma}


Spec = Union[EnsembleSpec, ShiftedGaussianSpec]

SPEC_SCHEMA = {
    "oneOf": [
        {
            "type": "object",
            "required": ["beta", "n", "rows"],
            "additionalProperties": False,
            "properties": {
                "beta": {"enum": [1, 2, 4]},
                "n": {"type": "integer", "minimum": 1},
                "rows": {
                    "type": "array",
                    "items": {
                        "oneOf": [
                            {
                                "type": "object",
                                "required": ["type", key],
                                "additionalProperties": False,
                                "properties": {
                                    "type": {"const": tag},
                                    key: {"type": "number", "exclusiveMinimum": 0},
                                },
                            }
                            for tag, key in (("gaussian", "sigma"), ("beta1", "nu"), ("beta2", "omega"))
                        ]
                    },
                },
            },
        },
        {
            "type": "object",
            "required": ["beta", "n", "c"],
            "additionalProperties": False,
            "properties": {
                "beta": {"enum": [1, 2, 4]},
                "n": {"type": "integer", "minimum": 1},
                "c": {"type": "number", "not": {"const": 0}},
                "sigma": {"type": "number", "exclusiveMinimum": 0},
            },
        },
    ]
}


def spec_from_json(obj) -> Spec:
    """Build a spec from its JSON form (a dict or a JSON string)."""
    if isinstance(obj, (str, bytes)):
        obj = json.loads(obj)
    jsonschema.validate(obj, SPEC_SCHEMA)
    if "c" in obj:
        return ShiftedGaussianSpec(obj["n"], obj["beta"], obj["c"], obj.get("sigma", 1.0))
    return EnsembleSpec(obj["beta"], obj["n"], tuple(row_from_json(r) for r in obj["rows"]))


# ---------------------------------------------------------------------------
# Field representations


def to_field(components, beta):
    """Real components (..., R, C, beta) -> field-valued array.

    beta = 1: real (..., R, C); beta = 2: complex (..., R, C);
    beta = 4: complex embedding (..., 2R, 2C).
    """
    comps = np.asarray(components)
    if beta == 1:
        return comps[..., 0]
    if beta == 2:
        return comps[..., 0] + 1j * comps[..., 1]
    z = comps[..., 0] + 1j * comps[..., 1]
    w = comps[..., 2] + 1j * comps[..., 3]
    *lead, r, c = z.shape
    out = np.empty((*lead, 2 * r, 2 * c), dtype=complex)
    out[..., 0::2, 0::2] = z
    out[..., 0::2, 1::2] = w
    out[..., 1::2, 0::2] = -np.conj(w)
    out[..., 1::2, 1::2] = np.conj(z)
    return out


def from_field(entries, beta):
    """Inverse of :func:`to_field`."""
    a = np.asarray(entries)
    if beta == 1:
        return a[..., None].astype(float)
    if beta == 2:
        return np.stack([a.real, a.imag], axis=-1)
    z = a[..., 0::2, 0::2]
    w = a[..., 0::2, 1::2]
    return np.stack([z.real, z.imag, w.real, w.imag], axis=-1)


@dataclass
class MatrixSample:
    """One matrix (or a stack of them) in field representation."""

    entries: np.ndarray
    beta: FieldIndex
    lam: float | None = None

    @property
    def n(self):
        size = self.entries.shape[-1]
        return size // 2 if self.beta == 4 else size

    def log_abs_det(self):
        """log |det X|, quaternion determinants taken as Prod r_jj (half the embedding value)."""
        _, logdet = np.linalg.slogdet(self.entries)
        return 0.5 * logdet if self.beta == 4 else logdet


# ---------------------------------------------------------------------------
# Samplers


def _shape(size):
    if size is None:
        return ()
    return tuple(np.atleast_1d(size).astype(int))


def sample_row_components(dist, n, beta, rng, size=None):
    """Real components of rows, shape size + (n, beta)."""
    shape = _shape(size)
    d = int(beta) * n
    g = rng.standard_normal(shape + (d,))
    if isinstance(dist, Gaussian):
        x = dist.sigma * g
    elif isinstance(dist, BetaI):
        r2 = rng.beta(d / 2, beta * dist.nu / 2, size=shape)
        norm = np.sqrt(np.einsum("...i,...i->...", g, g))
        x = g * (np.sqrt(r2) / norm)[..., None]
    elif isinstance(dist, BetaII):
        w = rng.chisquare(beta * dist.omega, size=shape)
        x = g / np.sqrt(w)[..., None]
    else:
        raise TypeError(f"unknown row distribution {dist!r}")
    return x.reshape(shape + (n, int(beta)))


def sample_row(dist, n, beta, rng):
    """One row over the field: real (n,), complex (n,), or a (2, 2n) quaternion block row."""
    row = to_field(sample_row_components(dist, n, beta, rng)[None], beta)
    return row if beta == 4 else row[0]


def sample_components(spec: EnsembleSpec, rng, size=None):
    """Real components of whole matrices, shape size + (N, N, beta)."""
    shape = _shape(size)
    rows = [sample_row_components(r, spec.n, spec.beta, rng, size) for r in spec.rows]
    return np.stack(rows, axis=len(shape))


def sample_matrix(spec: EnsembleSpec, rng, size=None) -> MatrixSample:
    return MatrixSample(to_field(sample_components(spec, rng, size), spec.beta), spec.beta)


def shifted_components(spec: ShiftedGaussianSpec, rng, size=None):
    shape = _shape(size)
    n, beta = spec.n, int(spec.beta)
    x = rng.standard_normal(shape + (n, n, beta)) * (spec.sigma / spec.c)
    idx = np.arange(n)
    x[..., idx, idx, 0] += 1.0
    return x


def sample_shifted(spec: ShiftedGaussianSpec, rng, size=None) -> MatrixSample:
    return MatrixSample(to_field(shifted_components(spec, rng, size), spec.beta), spec.beta, spec.lam)


def sample_spec(spec: Spec, rng, size=None) -> MatrixSample:
    if isinstance(spec, ShiftedGaussianSpec):
        return sample_shifted(spec, rng, size)
    return sample_matrix(spec, rng, size)


def spec_components(spec: Spec, rng, size=None):
    if isinstance(spec, ShiftedGaussianSpec):
        return shifted_components(spec, rng, size)
    return sample_components(spec, rng, size)


def sample_first_column_norm_sq(spec: Spec, rng, size=None):
    """Sum over rows of |x_l1|^2, drawing only single-entry marginals.

    The squared modulus of one entry is sigma^2 chi^2_beta (Gaussian),
    Beta(beta/2, beta(N-1+nu)/2) (beta type I) or chi^2_beta / chi^2_(beta
    omega) (beta type II).
    """
    shape = _shape(size)
    beta, n = int(spec.beta), spec.n
    if isinstance(spec, ShiftedGaussianSpec):
        s = spec.sigma / spec.c
        lead = 1.0 + s * rng.standard_normal(shape)
        rest = rng.chisquare(beta * n - 1, size=shape) if beta * n > 1 else 0.0
        return lead * lead + s * s * rest
    total = np.zeros(shape)
    for dist in spec.rows:
        if isinstance(dist, Gaussian):
            total += dist.sigma**2 * rng.chisquare(beta, size=shape)
        elif isinstance(dist, BetaI):
            total += rng.beta(beta / 2, beta * (n - 1 + dist.nu) / 2, size=shape)
        else:
            total += rng.chisquare(beta, size=shape) / rng.chisquare(beta * dist.omega, size=shape)
    return total
