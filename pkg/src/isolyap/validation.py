"""Named validation suites: cross-route equivalences and exact-versus-Monte-Carlo gates."""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass

import jsonschema

from . import exact, mhg, montecarlo
from .ensembles import EnsembleSpec, ShiftedGaussianSpec

# (N, N0, b1, b2, beta)
TWO_BLOCK_GRID = (
    (2, 1, 2.0, 1.0, 1),
    (3, 1, 1.5, 0.5, 1),
    (4, 2, 3.0, 1.0, 1),
    (6, 3, 10.0, 0.2, 1),
    (2, 1, 1.0, 0.9, 2),
    (3, 2, 4.0, 1.0, 2),
    (5, 1, 2.0, 0.5, 2),
    (6, 5, 1.2, 1.0, 2),
    (2, 1, 5.0, 0.1, 4),
    (3, 1, 2.0, 1.0, 4),
    (4, 3, 1.0, 0.25, 4),
    (6, 2, 0.8, 0.3, 4),
)


def mu1_specs():
    """Twelve specs: every field index against every row weight and the shifted ensemble."""
    out = []
    for beta in (1, 2, 4):
        out += [
            EnsembleSpec.gaussian(3, beta, [1.0, 0.7, 1.3]),
            EnsembleSpec.beta1(3, beta, [1.0, 2.0, 0.5]),
            EnsembleSpec.beta2(3, beta, [3.0, 2.5, 4.0]),
            ShiftedGaussianSpec(2, beta, 1.5, 1.0),
        ]
    return out


def det_moment_specs():
    # beta type II omegas keep |det|^(4 alpha) integrable at alpha = 2 even for beta = 1, so the
    # sample standard error is itself well estimated.
    out = []
    for beta in (1, 2, 4):
        out += [
            EnsembleSpec.gaussian(2, beta, [1.0, 0.8]),
            EnsembleSpec.gaussian(4, beta, 0.6),
            EnsembleSpec.beta1(2, beta, [1.0, 2.0]),
            EnsembleSpec.beta1(4, beta, [0.5, 1.0, 1.5, 3.0]),
            EnsembleSpec.beta2(2, beta, [18.0, 24.0]),
            EnsembleSpec.beta2(3, beta, [18.0, 20.0, 26.0]),
        ]
    return out


def describe(spec):
    if isinstance(spec, ShiftedGaussianSpec):
        return f"shifted(beta={int(spec.beta)},n={spec.n},c={spec.c:g},sigma={spec.sigma:g})"
    return f"{spec.kind}(beta={int(spec.beta)},n={spec.n},{list(map(float, spec.params))})"


@dataclass(frozen=True)
class Check:
    name: str
    metric: str  # "abs" or "z"
    value: float
    reference: float
    score: float
    threshold: float

    @property
    def passed(self):
        return bool(math.isfinite(self.score) and abs(self.score) < self.threshold)

    def to_json(self):
        out = asdict(self)
        out["passed"] = self.passed
        return out


def abs_check(name, value, reference, tol):
    return Check(name, "abs", float(value), float(reference), float(abs(value - reference)), tol)


def z_check(name, estimate, reference, limit=4.0):
    return Check(name, "z", estimate.value, float(reference), float(estimate.z_score(reference)), limit)


def formula_equivalence():
    checks = []
    for n, n0, b1, b2, beta in TWO_BLOCK_GRID:
        spec = exact.TwoBlockGaussianSpec(n, n0, b1, b2, beta)
        checks.append(
            abs_check(
                f"two-block vs general rates N={n} N0={n0} b1={b1} b2={b2} beta={beta}",
                exact.mu1_gaussian_two_block(spec),
                exact.mu1_gaussian_general(spec.rates(), beta),
                1e-8,
            )
        )
    for lam in (0.5, 1.0, 2.0, 5.0):
        checks.append(
            abs_check(
                f"shifted density vs E1 form lambda={lam}",
                exact.mu1_shifted(2, 1, lam),
                exact.mu1_shifted_2x2(lam / 2.0),
                1e-8,
            )
        )
    for t in (0.5, 1.0, 2.0):
        checks.append(
            abs_check(
                f"large-N a3 vs Kargin limit t={t}",
                exact.mu1_asymptotic("a3", n=10, b1=5.0, b2=t / 2.0, beta=1),
                exact.kargin_limit(t),
                1e-6,
            )
        )
    checks.append(
        abs_check(
            "beta type I Fourier series vs Frullani integral N=2 beta=1 nu=(1,1)",
            exact.mu1_betaI_fourier([1.0, 1.0], 1, 2, n_terms=2000),
            exact.mu1_betaI([1.0, 1.0], 1, 2),
            1e-4,
        )
    )
    for beta in (1, 2, 4):
        for k in (1, 2, 3):
            checks.append(
                abs_check(
                    f"1F1 Kummer transform beta={beta} k={k} ctilde=0.5",
                    mhg.noncentral_wishart_det_moment_kummer(3, k, beta, 1.0, 1.0, 0.5),
                    mhg.noncentral_wishart_det_moment(3, k, beta, 1.0, 1.0, 0.5),
                    1e-8,
                )
            )
    return checks


def mu1_crosscheck(samples=10**6, seed=20240601):
    checks = []
    for i, spec in enumerate(mu1_specs()):
        est = montecarlo.estimate_mu1_column(spec, samples, seed + i)
        checks.append(z_check(f"mu1 quadrature vs column MC {describe(spec)}", est, exact.mu1(spec)))
    return checks


def det_moment_crosscheck(samples=10**6, seed=20240602):
    checks = []
    for i, spec in enumerate(det_moment_specs()):
        for alpha in (1, 2):
            est = montecarlo.estimate_det_moment(spec, alpha, samples, seed + 10 * i + alpha)
            checks.append(
                z_check(f"det moment alpha={alpha} {describe(spec)}", est, exact.det_moment(spec, alpha))
            )
    return checks


SUITES = {
    "formula-equivalence": formula_equivalence,
    "mu1-crosscheck": mu1_crosscheck,
    "det-moment-crosscheck": det_moment_crosscheck,
    "exact-vs-mc": lambda: mu1_crosscheck() + det_moment_crosscheck(),
}

REPORT_SCHEMA = {
    "type": "object",
    "required": ["suite", "passed", "elapsed_s", "checks"],
    "additionalProperties": False,
    "properties": {
        "suite": {"type": "string", "enum": sorted(SUITES)},
        "passed": {"type": "boolean"},
        "elapsed_s": {"type": "number", "minimum": 0},
        "checks": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["name", "metric", "value", "reference", "score", "threshold", "passed"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string"},
                    "metric": {"enum": ["abs", "z"]},
                    "value": {"type": "number"},
                    "reference": {"type": "number"},
                    "score": {"type": "number"},
                    "threshold": {"type": "number", "exclusiveMinimum": 0},
                    "passed": {"type": "boolean"},
                },
            },
        },
    },
}


def run_suite(name):
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    start = time.perf_counter()
    checks = SUITES[name]()
    report = {
        "suite": name,
        "passed": all(c.passed for c in checks),
        "elapsed_s": time.perf_counter() - start,
        "checks": [c.to_json() for c in checks],
    }
    jsonschema.validate(report, REPORT_SCHEMA)
    return report
