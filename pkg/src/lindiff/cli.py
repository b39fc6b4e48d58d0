"""Command-line interface.

Subcommands:
  theory        closed-form prediction as a single JSON object
  simulate      Monte Carlo trials at one configuration, CSV out
  sweep         Cartesian parameter grid, CSV out
  validate-rmt  Monte Carlo check of every tabulated trace against closed form
  chain         multi-step chain study: set distance vs step count, CSV out

Every flag has a long form. `--config <path>` reads a line-based
``key = value`` file supplying defaults that explicit flags override. Exit
codes: 0 success, 1 invalid arguments or values, 2 runtime failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from .chain import ChainConfig, chain_eog_trial
from .config import ModelConfig
from .harness import (
    ChainRow,
    ResultRow,
    SweepSpec,
    csv_text,
    run_sweep,
    run_trial,
    write_csv,
)
from .rng import derive_seed, make_rng
from .theory import (
    b_a,
    c_ab,
    kl_var_ridgeless,
    mc_wishart_oracle,
    solve_renormalized_ridge,
)

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage by default; this artifact reserves 2 for
    runtime failures and reports bad arguments with exit code 1."""

    def error(self, message: str) -> None:  # noqa: D401 - argparse hook
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _load_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_config_file(args: argparse.Namespace) -> None:
    """Fill argparse sentinels (None) from the --config file, if any."""
    if not getattr(args, "config", None):
        return
    for key, raw in _load_config_file(args.config).items():
        if not hasattr(args, key):
            raise ValueError(f"config file key {key!r} is not a flag of this command")
        if getattr(args, key) is None:
            parser_type = _CONFIG_TYPES.get(key, str)
            setattr(args, key, parser_type(raw))


_CONFIG_TYPES = {
    "alpha": float,
    "lambda_hat": float,
    "T": float,
    "sigma": float,
    "mu": float,
    "ridge_hat": float,
    "d": int,
    "n": int,
    "trials": int,
    "seed": int,
    "steps": _int_list,
    "beta": float,
    "lam": float,
    "components": _int_list,
    "seeds": int,
    "mu0": float,
    "spacing": float,
    "comp_sigma": float,
    "eval_size": int,
    "repeats": int,
    "tol": float,
    "protocol": str,
    "output": str,
    "grid": str,
}


def _resolve(args: argparse.Namespace, defaults: dict[str, object]) -> None:
    for key, value in defaults.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)


def _cmd_theory(args: argparse.Namespace) -> int:
    _resolve(args, {"lambda_hat": 0.0, "T": 1.0})
    t = kl_var_ridgeless(args.alpha, args.lambda_hat, args.T, d=1)
    payload = {
        "alpha": args.alpha,
        "lambda_hat": args.lambda_hat,
        "T": args.T,
        "branch": t.branch.value,
        "order1_per_d": t.order1,
        "order2_per_d": t.order2,
        "total_per_d": t.total,
    }
    print(json.dumps(payload))
    return 0


def _base_config(args: argparse.Namespace) -> ModelConfig:
    if args.n is None:
        if args.alpha is None:
            raise ValueError("provide --n or --alpha")
        args.n = max(1, round(args.d / args.alpha))
    return ModelConfig(
        n=args.n,
        d=args.d,
        T=args.T,
        lambda_hat=args.lambda_hat,
        sigma=args.sigma,
        mu=args.mu,
        ridge_hat=args.ridge_hat,
        seed=args.seed,
    )


def _cmd_simulate(args: argparse.Namespace) -> int:
    _resolve(
        args,
        {
            "d": 64,
            "lambda_hat": 0.05,
            "T": 2.0,
            "sigma": 1.0,
            "mu": 0.0,
            "ridge_hat": 0.0,
            "trials": 1,
            "seed": 0,
            "protocol": "matched",
        },
    )
    base = _base_config(args)
    rows = []
    for ti in range(args.trials):
        config = replace(base, seed=derive_seed(base.seed, 0, ti))
        row = run_trial(config, protocol=args.protocol, timing=args.timing)
        rows.append(replace(row, trial_index=ti))
    if args.output:
        write_csv(rows, args.output)
    else:
        sys.stdout.write(csv_text(rows, ResultRow))
    return 0


def _parse_grids(pairs: list[str]) -> dict[str, list[float]]:
    grids: dict[str, list[float]] = {}
    for pair in pairs:
        if "=" not in pair:
            raise ValueError(f"--grid expects name=v1,v2,..., got {pair!r}")
        name, _, values = pair.partition("=")
        grids[name.strip().replace("-", "_")] = _float_list(values)
    return grids


def _cmd_sweep(args: argparse.Namespace) -> int:
    _resolve(
        args,
        {
            "d": 64,
            "n": None,
            "lambda_hat": 0.05,
            "T": 2.0,
            "sigma": 1.0,
            "mu": 0.0,
            "ridge_hat": 0.0,
            "trials": 1,
            "seed": 0,
            "protocol": "matched",
        },
    )
    if not args.grid:
        raise ValueError("sweep requires at least one --grid name=v1,v2,...")
    grids = _parse_grids(args.grid)
    if args.n is None:
        args.n = args.d  # placeholder; alpha grids derive n per point
    base = _base_config(args)
    spec = SweepSpec(grids=grids, trials=args.trials, base=base, output_path=args.output)
    run_sweep(spec, protocol=args.protocol, timing=args.timing)
    return 0


def _cmd_validate_rmt(args: argparse.Namespace) -> int:
    _resolve(
        args,
        {
            "d": 256,
            "n": [512, 128],
            "ridge_hat": [0.05, 0.5],
            "trials": 50,
            "tol": 0.05,
            "seed": 2024,
        },
    )
    rng = make_rng(args.seed)
    failures = 0
    print(f"{'n':>6} {'ridge_hat':>9} {'quantity':>9} {'closed_form':>14} "
          f"{'monte_carlo':>14} {'rel_gap':>9}")
    for n in args.n:
        alpha = args.d / n
        for ridge_hat in args.ridge_hat:
            pair = solve_renormalized_ridge(ridge_hat, alpha, 1.0)
            checks: list[tuple[str, float, float]] = []
            for a in (1, 2, 3):
                for b in (1, 2, 3):
                    mc = mc_wishart_oracle(a, b, ridge_hat, n, args.d, args.trials, rng)
                    checks.append((f"C_{a}{b}", c_ab(a, b, pair, args.d), mc))
            for a in (1, 2, 3, 4):
                mc = ridge_hat**a * mc_wishart_oracle(
                    0, a, ridge_hat, n, args.d, args.trials, rng
                )
                checks.append((f"B_{a}", b_a(a, pair, args.d), mc))
            for name, closed, mc in checks:
                rel = abs(closed - mc) / abs(mc)
                flag = "" if rel <= args.tol else "  FAIL"
                failures += rel > args.tol
                print(f"{n:>6} {ridge_hat:>9g} {name:>9} {closed:>14.6e} "
                      f"{mc:>14.6e} {rel:>9.4%}{flag}")
    if failures:
        raise RuntimeError(f"{failures} quantities exceeded tolerance {args.tol}")
    return 0


def _cmd_chain(args: argparse.Namespace) -> int:
    _resolve(
        args,
        {
            "steps": [2, 5, 10, 20],
            "beta": 0.3,
            "lam": 1.0,
            "components": [1, 2],
            "n": 4000,
            "d": 16,
            "seeds": 10,
            "mu0": 0.5,
            "spacing": 1.0,
            "comp_sigma": 0.1,
            "eval_size": 2000,
            "repeats": 1,
            "seed": 0,
        },
    )
    rows = []
    for components in args.components:
        for s in args.steps:
            for trial in range(args.seeds):
                config = ChainConfig(
                    steps=s,
                    beta=args.beta,
                    lam=args.lam,
                    components=components,
                    n=args.n,
                    d=args.d,
                    mu0=args.mu0,
                    spacing=args.spacing,
                    comp_sigma=args.comp_sigma,
                    seed=derive_seed(args.seed, components, trial),
                )
                start = time.perf_counter()
                value = chain_eog_trial(
                    config, eval_size=args.eval_size, repeats=args.repeats
                )
                elapsed = (time.perf_counter() - start) * 1e3 if args.timing else 0.0
                rows.append(
                    ChainRow(
                        s=s,
                        beta=args.beta,
                        lam=args.lam,
                        C=components,
                        d=args.d,
                        n=args.n,
                        trial=trial,
                        e_og=value,
                        wall_time_ms=elapsed,
                    )
                )
    if args.output:
        write_csv(rows, args.output)
    else:
        sys.stdout.write(csv_text(rows, ChainRow))
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="lindiff", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_theory = sub.add_parser("theory", help="closed-form prediction as JSON")
    p_theory.add_argument("--alpha", type=float, required=True)
    p_theory.add_argument("--lambda-hat", dest="lambda_hat", type=float)
    p_theory.add_argument("--T", "--time-cutoff", dest="T", type=float)
    p_theory.add_argument("--config", type=str)
    p_theory.set_defaults(func=_cmd_theory)

    p_sim = sub.add_parser("simulate", help="Monte Carlo trials at one point")
    p_sim.add_argument("--d", type=int)
    p_sim.add_argument("--n", type=int)
    p_sim.add_argument("--alpha", type=float, help="derives n = round(d / alpha)")
    p_sim.add_argument("--lambda-hat", dest="lambda_hat", type=float)
    p_sim.add_argument("--T", "--time-cutoff", dest="T", type=float)
    p_sim.add_argument("--sigma", type=float)
    p_sim.add_argument("--mu", type=float)
    p_sim.add_argument("--ridge-hat", dest="ridge_hat", type=float)
    p_sim.add_argument("--trials", type=int)
    p_sim.add_argument("--seed", type=int)
    p_sim.add_argument("--protocol", choices=("matched", "forward"))
    p_sim.add_argument("--output", type=str)
    p_sim.add_argument("--timing", action="store_true",
                       help="fill wall_time_ms (breaks byte-reproducibility)")
    p_sim.add_argument("--config", type=str)
    p_sim.set_defaults(func=_cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="Cartesian grid sweep to CSV")
    p_sweep.add_argument("--grid", action="append", metavar="NAME=V1,V2,...",
                         help="sweepable: alpha, lambda_hat, T, d, n, ridge_hat")
    p_sweep.add_argument("--d", type=int)
    p_sweep.add_argument("--n", type=int)
    p_sweep.add_argument("--lambda-hat", dest="lambda_hat", type=float)
    p_sweep.add_argument("--T", "--time-cutoff", dest="T", type=float)
    p_sweep.add_argument("--sigma", type=float)
    p_sweep.add_argument("--mu", type=float)
    p_sweep.add_argument("--ridge-hat", dest="ridge_hat", type=float)
    p_sweep.add_argument("--trials", type=int)
    p_sweep.add_argument("--seed", type=int)
    p_sweep.add_argument("--protocol", choices=("matched", "forward"))
    p_sweep.add_argument("--output", type=str, required=True)
    p_sweep.add_argument("--timing", action="store_true")
    p_sweep.add_argument("--config", type=str)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_rmt = sub.add_parser("validate-rmt", help="Monte Carlo check of the trace tables")
    p_rmt.add_argument("--d", type=int)
    p_rmt.add_argument("--n", type=_int_list, metavar="N1,N2,...")
    p_rmt.add_argument("--ridge-hat", dest="ridge_hat", type=_float_list,
                       metavar="R1,R2,...")
    p_rmt.add_argument("--trials", type=int)
    p_rmt.add_argument("--tol", type=float)
    p_rmt.add_argument("--seed", type=int)
    p_rmt.add_argument("--config", type=str)
    p_rmt.set_defaults(func=_cmd_validate_rmt)

    p_chain = sub.add_parser("chain", help="set distance vs step count to CSV")
    p_chain.add_argument("--steps", type=_int_list, metavar="S1,S2,...")
    p_chain.add_argument("--beta", type=float)
    p_chain.add_argument("--lambda", dest="lam", type=float)
    p_chain.add_argument("--components", type=_int_list, metavar="C1,C2,...")
    p_chain.add_argument("--n", type=int)
    p_chain.add_argument("--d", type=int)
    p_chain.add_argument("--seeds", type=int, help="number of independent seeds")
    p_chain.add_argument("--mu0", type=float)
    p_chain.add_argument("--spacing", type=float)
    p_chain.add_argument("--comp-sigma", dest="comp_sigma", type=float)
    p_chain.add_argument("--eval-size", dest="eval_size", type=int)
    p_chain.add_argument("--repeats", type=int,
                         help="generation repeats averaged per seed")
    p_chain.add_argument("--seed", type=int)
    p_chain.add_argument("--output", type=str)
    p_chain.add_argument("--timing", action="store_true")
    p_chain.add_argument("--config", type=str)
    p_chain.set_defaults(func=_cmd_chain)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config_file(args)
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"lindiff: invalid arguments: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"lindiff: runtime failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
