"""Full Lyapunov spectrum by QR re-orthogonalisation, next to the Gaussian closed forms."""

import argparse
import time

from isolyap import exact
from isolyap.ensembles import EnsembleSpec
from isolyap.montecarlo import estimate_spectrum


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--beta", type=int, default=2, choices=(1, 2, 4))
    p.add_argument("--m", type=int, default=5000)
    p.add_argument("--trials", type=int, default=40)
    p.add_argument("--seed", type=int, default=1)
    args = p.parse_args()
    spec = EnsembleSpec.gaussian(args.n, args.beta)
    start = time.perf_counter()
    sp = estimate_spectrum(spec, args.m, args.trials, args.seed)
    took = time.perf_counter() - start
    exact_mu = exact.gaussian_spectrum(args.n, args.beta)
    print(f"{'k':>3} {'MC':>12} {'SE':>10} {'exact':>12} {'z':>7}")
    for k, (est, mu) in enumerate(zip(sp.exponents, exact_mu), start=1):
        print(f"{k:3d} {est.value:12.6f} {est.std_error:10.2e} {mu:12.6f} {est.z_score(mu):7.2f}")
    print(f"{args.trials} trials x {args.m} steps in {took:.1f} s")


if __name__ == "__main__":
    main()
