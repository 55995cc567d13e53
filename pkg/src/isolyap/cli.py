"""Command-line front end.

    isolyap exact    --spec s.json --quantity mu1
    isolyap mc       --spec s.json --quantity spectrum --m 10000 --trials 50 --seed 1
    isolyap validate --suite formula-equivalence --out report.json
    isolyap sweep    --spec s.json --quantity mu1-shifted --param lambda --values 1 10 100

Exit codes: 0 success, 1 validation gate failure, 2 bad configuration,
3 compute failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
from dataclasses import dataclass, field

import jsonschema

from . import exact, mhg, montecarlo, validation
from .ensembles import EnsembleSpec, ShiftedGaussianSpec, spec_from_json
from .errors import IsolyapError

EXIT_OK, EXIT_GATE, EXIT_CONFIG, EXIT_COMPUTE = 0, 1, 2, 3

EXACT_QUANTITIES = (
    "det-moment",
    "lyap-sum",
    "lyap-partial-sum",
    "mu1",
    "mu1-fourier",
    "mu1-shifted",
    "mu1-shifted-2x2",
    "lyap-sum-shifted-asymptotic",
    "wishart-moment",
)
MC_QUANTITIES = ("det-moment", "lyap-sum", "lyap-partial-sum", "mu1", "spectrum", "wishart-moment")
QUANTITIES = tuple(sorted(set(EXACT_QUANTITIES) | set(MC_QUANTITIES)))
SWEEP_PARAMS = ("alpha", "k", "n", "beta", "sigma", "nu", "omega", "c", "lambda")

RESULT_SCHEMA = {
    "type": "object",
    "required": ["command", "quantity", "spec", "rows"],
    "additionalProperties": False,
    "properties": {
        "command": {"enum": ["exact", "mc", "sweep"]},
        "quantity": {"enum": list(QUANTITIES)},
        "spec": {"type": "object"},
        "rows": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["param", "value", "quantity", "estimate", "error", "method"],
                "properties": {
                    "param": {"type": ["string", "null"]},
                    "value": {"type": ["number", "null"]},
                    "quantity": {"type": "string"},
                    "estimate": {"type": "number"},
                    "error": {"type": "number", "minimum": 0},
                    "method": {"type": "string"},
                    "samples": {"type": "integer"},
                    "seed": {"type": "integer"},
                },
            },
        },
    },
}


class ConfigError(ValueError):
    """Invalid command-line configuration or spec file."""


@dataclass
class RunConfig:
    command: str
    spec: object = None
    quantity: str | None = None
    alpha: float = 1.0
    k: int | None = None
    m: int = 10_000
    trials: int = 50
    samples: int = 1_000_000
    seed: int = 0
    n_terms: int = 2000
    out: str | None = None
    fmt: str = "text"
    suite: str | None = None
    param: str | None = None
    values: list = field(default_factory=list)
    mode: str = "exact"


@dataclass(frozen=True)
class Row:
    quantity: str
    estimate: float
    error: float
    method: str
    param: str | None = None
    value: float | None = None
    samples: int | None = None
    seed: int | None = None

    def to_json(self):
        return {k: v for k, v in dataclasses.asdict(self).items() if v is not None or k in ("param", "value")}


def _fmt(x):
    return format(float(x), ".17g")


# ---------------------------------------------------------------------------
# Evaluation


def _need_shifted(spec, quantity):
    if not isinstance(spec, ShiftedGaussianSpec):
        raise ConfigError(f"{quantity} needs a shifted spec with keys beta, n, c, sigma")


def _need_ensemble(spec, quantity):
    if not isinstance(spec, EnsembleSpec):
        raise ConfigError(f"{quantity} needs a row-ensemble spec")


def _k(cfg, spec):
    return spec.n if cfg.k is None else cfg.k


def evaluate_exact(cfg: RunConfig, spec) -> Row:
    q = cfg.quantity
    if q == "det-moment":
        _need_ensemble(spec, q)
        return Row(q, exact.det_moment(spec, cfg.alpha), 0.0, "closed-form")
    if q == "lyap-sum":
        if isinstance(spec, ShiftedGaussianSpec):
            raise ConfigError("no closed form for the shifted ensemble; use lyap-sum-shifted-asymptotic")
        return Row(q, exact.lyapunov_sum(spec), 0.0, "closed-form")
    if q == "lyap-partial-sum":
        _need_ensemble(spec, q)
        if spec.kind != "gaussian" or len(set(spec.params)) != 1:
            raise ConfigError("partial sums are available for equal-sigma Gaussian specs only")
        val = exact.lyapunov_partial_sum_gaussian(spec.n, _k(cfg, spec), spec.beta, spec.params[0])
        return Row(q, val, 0.0, "closed-form")
    if q == "mu1":
        res = exact.mu1(spec, full_output=True)
        return Row(q, res.value, res.est_abs_error, res.method)
    if q == "mu1-fourier":
        _need_ensemble(spec, q)
        if spec.kind != "beta1":
            raise ConfigError("mu1-fourier applies to beta type I specs")
        res = exact.mu1_betaI_fourier(spec.params, spec.beta, spec.n, cfg.n_terms, full_output=True)
        return Row(q, res.value, res.est_abs_error, "fourier-series")
    if q == "mu1-shifted":
        _need_shifted(spec, q)
        res = exact.mu1_shifted(spec.n, spec.beta, spec.lam, full_output=True)
        return Row(q, res.value, res.est_abs_error, res.method)
    if q == "mu1-shifted-2x2":
        _need_shifted(spec, q)
        if spec.n != 2 or spec.beta != 1:
            raise ConfigError("mu1-shifted-2x2 is the real 2 x 2 case only")
        return Row(q, exact.mu1_shifted_2x2(spec.ctilde), 0.0, "closed-form")
    if q == "lyap-sum-shifted-asymptotic":
        _need_shifted(spec, q)
        val = exact.lyap_sum_shifted_asymptotic(spec.n, _k(cfg, spec), spec.beta, spec.sigma, spec.c)
        return Row(q, val, 0.0, "asymptotic")
    if q == "wishart-moment":
        _need_shifted(spec, q)
        val = mhg.noncentral_wishart_det_moment(spec.n, _k(cfg, spec), spec.beta, spec.sigma, spec.c, cfg.alpha)
        return Row(q, val, 0.0, "series")
    raise ConfigError(f"quantity {q!r} has no exact evaluator; choose from {EXACT_QUANTITIES}")


def evaluate_mc(cfg: RunConfig, spec) -> list:
    q = cfg.quantity

    def row(est, name=q, method="monte-carlo"):
        return Row(name, est.value, est.std_error, method, samples=est.samples, seed=est.master_seed)

    if q == "mu1":
        return [row(montecarlo.estimate_mu1_column(spec, cfg.samples, cfg.seed), method="column-mc")]
    if q == "det-moment":
        return [row(montecarlo.estimate_det_moment(spec, cfg.alpha, cfg.samples, cfg.seed, k=cfg.k))]
    if q == "wishart-moment":
        _need_shifted(spec, q)
        est = montecarlo.estimate_wishart_moment(
            spec.n, _k(cfg, spec), spec.beta, spec.sigma, spec.c, cfg.alpha, cfg.samples, cfg.seed
        )
        return [row(est)]
    if q in ("spectrum", "lyap-sum", "lyap-partial-sum"):
        res = montecarlo.estimate_spectrum(spec, cfg.m, cfg.trials, cfg.seed)
        if q == "lyap-sum":
            return [row(res.total(), method="qr-spectrum")]
        if q == "lyap-partial-sum":
            return [row(res.partial_sum(_k(cfg, spec)), method="qr-spectrum")]
        return [row(e, f"mu{j}", "qr-spectrum") for j, e in enumerate(res.exponents, start=1)]
    raise ConfigError(f"quantity {q!r} has no Monte-Carlo estimator; choose from {MC_QUANTITIES}")


def _with_param(cfg, spec, name, value):
    """Copies of (cfg, spec) with one parameter set to ``value``."""
    if name == "alpha":
        return dataclasses.replace(cfg, alpha=float(value)), spec
    if name == "k":
        return dataclasses.replace(cfg, k=int(value)), spec
    obj = spec.to_json()
    if isinstance(spec, ShiftedGaussianSpec):
        if name == "lambda":
            obj["c"] = obj["sigma"] * math.sqrt(float(value))
        elif name in ("c", "sigma"):
            obj[name] = float(value)
        elif name in ("n", "beta"):
            obj[name] = int(value)
        else:
            raise ConfigError(f"cannot sweep {name!r} on a shifted spec")
        return cfg, spec_from_json(obj)
    if name in ("n", "beta"):
        obj[name] = int(value)
        if name == "n":
            obj["rows"] = [obj["rows"][0]] * int(value)
        return cfg, spec_from_json(obj)
    key = {"gaussian": "sigma", "beta1": "nu", "beta2": "omega"}[spec.kind]
    if name != key:
        raise ConfigError(f"cannot sweep {name!r} on a {spec.kind} spec")
    obj["rows"] = [{"type": spec.kind, key: float(value)} for _ in obj["rows"]]
    return cfg, spec_from_json(obj)


def run_rows(cfg: RunConfig) -> list:
    if cfg.command == "exact":
        return [evaluate_exact(cfg, cfg.spec)]
    if cfg.command == "mc":
        return evaluate_mc(cfg, cfg.spec)
    rows = []
    for v in cfg.values:
        c2, s2 = _with_param(cfg, cfg.spec, cfg.param, v)
        got = [evaluate_exact(c2, s2)] if cfg.mode == "exact" else evaluate_mc(c2, s2)
        rows += [dataclasses.replace(r, param=cfg.param, value=float(v)) for r in got]
    return rows


# ---------------------------------------------------------------------------
# Output


def render_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["param", "value", "quantity", "estimate", "error"])
    for r in rows:
        w.writerow(
            [
                r.param or "",
                "" if r.value is None else _fmt(r.value),
                r.quantity,
                _fmt(r.estimate),
                _fmt(r.error),
            ]
        )
    return buf.getvalue()


def render_json(cfg, rows):
    doc = {
        "command": cfg.command,
        "quantity": cfg.quantity,
        "spec": cfg.spec.to_json(),
        "rows": [r.to_json() for r in rows],
    }
    jsonschema.validate(doc, RESULT_SCHEMA)
    return json.dumps(doc, indent=2) + "\n"


def render_text(rows):
    lines = []
    for r in rows:
        head = f"{r.param}={_fmt(r.value)} " if r.param else ""
        extra = f" samples={r.samples} seed={r.seed}" if r.samples is not None else ""
        lines.append(f"{head}{r.quantity} = {_fmt(r.estimate)} +/- {_fmt(r.error)} [{r.method}]{extra}")
    return "\n".join(lines) + "\n"


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(cfg: RunConfig) -> int:
    if cfg.command == "validate":
        try:
            report = validation.run_suite(cfg.suite)
        except IsolyapError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_COMPUTE
        _emit(json.dumps(report, indent=2) + "\n", cfg.out)
        for c in report["checks"]:
            status = "PASS" if c["passed"] else "FAIL"
            print(f"{status} {c['metric']}={c['score']:.3g} (< {c['threshold']:g}) {c['name']}", file=sys.stderr)
        return EXIT_OK if report["passed"] else EXIT_GATE
    try:
        rows = run_rows(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IsolyapError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if cfg.fmt == "csv":
        text = render_csv(rows)
    elif cfg.fmt == "json":
        text = render_json(cfg, rows)
    else:
        text = render_text(rows)
    _emit(text, cfg.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing


def build_parser():
    p = argparse.ArgumentParser(prog="isolyap", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, quantities):
        sp.add_argument("--spec", required=True, help="JSON spec file ('-' for stdin)")
        sp.add_argument("--quantity", required=True, choices=quantities)
        sp.add_argument("--alpha", type=float, default=1.0)
        sp.add_argument("--k", type=int)
        sp.add_argument("--n-terms", type=int, default=2000, help="Fourier series length")
        sp.add_argument("--m", type=int, default=10_000, help="product length per trial")
        sp.add_argument("--trials", type=int, default=50)
        sp.add_argument("--samples", type=int, default=1_000_000)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out")
        sp.add_argument("--format", dest="fmt", choices=("text", "csv", "json"), default="text")

    common(sub.add_parser("exact", help="closed-form or quadrature value"), EXACT_QUANTITIES)
    common(sub.add_parser("mc", help="Monte-Carlo estimate"), MC_QUANTITIES)
    sw = sub.add_parser("sweep", help="vary one parameter, write CSV")
    common(sw, QUANTITIES)
    sw.add_argument("--param", required=True, choices=SWEEP_PARAMS)
    sw.add_argument("--values", required=True, nargs="+", type=float)
    sw.add_argument("--mode", choices=("exact", "mc"), default="exact")
    sw.set_defaults(fmt="csv")
    va = sub.add_parser("validate", help="run a named validation suite")
    va.add_argument("--suite", required=True, choices=sorted(validation.SUITES))
    va.add_argument("--out")
    return p


def load_spec(path):
    try:
        if path == "-":
            obj = json.load(sys.stdin)
        else:
            with open(path, encoding="utf-8") as fh:
                obj = json.load(fh)
        return spec_from_json(obj)
    except (OSError, json.JSONDecodeError, jsonschema.ValidationError, ValueError, TypeError) as exc:
        raise ConfigError(f"cannot load spec {path!r}: {exc}") from exc


def config_from_args(ns) -> RunConfig:
    if ns.command == "validate":
        return RunConfig("validate", suite=ns.suite, out=ns.out, fmt="json")
    spec = load_spec(ns.spec)
    for name in ("m", "trials", "samples", "n_terms"):
        if getattr(ns, name) < 1:
            raise ConfigError(f"--{name.replace('_', '-')} must be positive")
    return RunConfig(
        ns.command,
        spec=spec,
        quantity=ns.quantity,
        alpha=ns.alpha,
        k=ns.k,
        m=ns.m,
        trials=ns.trials,
        samples=ns.samples,
        seed=ns.seed,
        n_terms=ns.n_terms,
        out=ns.out,
        fmt=ns.fmt,
        param=getattr(ns, "param", None),
        values=list(getattr(ns, "values", []) or []),
        mode=getattr(ns, "mode", "exact"),
    )


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
