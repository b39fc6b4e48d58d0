"""Study multi-step chains: overlap error vs step count for mixture targets.

For well separated mixture components the refit error compounds with the
number of steps, so e_og should shrink as s grows.

  python3 scripts/chain_study.py --components 2 --steps 2,5,10,20 --seeds 10
"""
import argparse

import numpy as np

from lindiff import ChainConfig, chain_eog_trial


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--components", type=int, default=2)
    ap.add_argument("--steps", default="2,5,10,20")
    ap.add_argument("--beta", type=float, default=0.3)
    ap.add_argument("--lam", type=float, default=1.0)
    ap.add_argument("--d", type=int, default=16)
    ap.add_argument("--n", type=int, default=4000)
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    steps = [int(tok) for tok in args.steps.split(",")]
    print(f"{'s':>4} {'median e_og':>12} {'mean e_og':>12}")
    for s in steps:
        vals = []
        for seed in range(args.seeds):
            config = ChainConfig(
                steps=s, beta=args.beta, lam=args.lam,
                components=args.components, n=args.n, d=args.d, seed=seed,
            )
            vals.append(chain_eog_trial(config, repeats=args.repeats))
        print(f"{s:>4} {float(np.median(vals)):>12.4f} {float(np.mean(vals)):>12.4f}")


if __name__ == "__main__":
    main()
