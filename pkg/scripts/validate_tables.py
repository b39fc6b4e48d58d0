"""Spot-check the closed-form trace tables against the Monte Carlo oracle.

Prints relative gaps for every tabulated (a, b) moment plus the B_a traces at
one configuration per branch; anything above a few percent at 100 trials
indicates a transcription bug.

  python3 scripts/validate_tables.py --d 256 --trials 100
"""
import argparse

import numpy as np

from lindiff import (
    b_a,
    c_ab,
    make_rng,
    mc_wishart_oracle,
    solve_renormalized_ridge,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--d", type=int, default=256)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--ridge-hat", type=float, default=0.1)
    ap.add_argument("--seed", type=int, default=20240803)
    args = ap.parse_args()

    for n in (2 * args.d, args.d // 2):
        alpha = args.d / n
        pair = solve_renormalized_ridge(args.ridge_hat, alpha, 1.0)
        print(f"alpha={alpha:g} ridge_hat={args.ridge_hat:g}")
        rng = make_rng(args.seed)
        for a in (1, 2, 3):
            for b in (0, 1, 2, 3):
                closed = c_ab(a, b, pair, args.d)
                mc = mc_wishart_oracle(a, b, args.ridge_hat, n, args.d,
                                       args.trials, rng)
                print(f"  C[{a},{b}]  closed={closed:>12.5e}  mc={mc:>12.5e}  "
                      f"gap={abs(closed - mc) / abs(mc):.3%}")
        for a in (1, 2, 3, 4):
            closed = b_a(a, pair, args.d, debug=True)
            mc = args.ridge_hat ** a * mc_wishart_oracle(0, a, args.ridge_hat,
                                                         n, args.d,
                                                         args.trials, rng)
            print(f"  B[{a}]    closed={closed:>12.5e}  mc={mc:>12.5e}  "
                  f"gap={abs(closed - mc) / abs(mc):.3%}")


if __name__ == "__main__":
    main()
