"""Largest exponent of c I + X as the shift grows, against the large-c leading term."""

import argparse
import math

from isolyap import exact


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--beta", type=int, default=1, choices=(1, 2, 4))
    p.add_argument("--lam", type=float, nargs="+", default=[0.5, 2, 10, 50, 500, 5000])
    args = p.parse_args()
    print(f"{'lambda':>10} {'mu1':>22} {'leading':>22} {'ratio':>10}")
    for lam in args.lam:
        mu = exact.mu1_shifted(args.n, args.beta, lam)
        lead = exact.lyap_sum_shifted_asymptotic(args.n, 1, args.beta, 1.0, math.sqrt(lam))
        ratio = mu / lead if lead else float("nan")
        print(f"{lam:10g} {mu:22.15e} {lead:22.15e} {ratio:10.5f}")


if __name__ == "__main__":
    main()
