"""Convergence of the Fourier series for beta type I rows, raw and tail-corrected."""

import argparse
import warnings

from isolyap import exact


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--nu", type=float, nargs="+", default=[1.0, 1.0])
    p.add_argument("--beta", type=int, default=1, choices=(1, 2, 4))
    p.add_argument("--terms", type=int, nargs="+", default=[100, 250, 500, 1000, 2000, 4000])
    args = p.parse_args()
    n = len(args.nu)
    ref = exact.mu1_betaI(args.nu, args.beta, n)
    print(f"integral: {ref:.15f}")
    print(f"{'terms':>6} {'raw err':>12} {'fitted err':>12} {'est err':>12}")
    for terms in args.terms:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", exact.SlowDecayWarning)
            r = exact.mu1_betaI_fourier(args.nu, args.beta, n, n_terms=terms, full_output=True)
        print(f"{terms:6d} {r.raw_value - ref:12.3e} {r.value - ref:12.3e} {r.est_abs_error:12.3e}")


if __name__ == "__main__":
    main()
