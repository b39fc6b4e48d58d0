"""Trial execution, sweep orchestration, and deterministic CSV emission.

A trial draws a training set, fits the affine denoiser, builds the generated
Gaussian, and reports the KL decomposition next to the closed-form
prediction. Two sampling protocols are available:

* "matched" (default): the design is drawn directly from the law the theory
  engine assumes — x ~ N(exp(-T) mu, sigma_x_sq I) with targets
  y = exp(T) x + sqrt(delta_T) z — and the generator is initialized at the
  population moments. Trial averages converge to the closed forms.
* "forward": the literal pipeline — clean draw, forward noising, empirical
  generator initialization. Faithful to the sampling story but its trial
  averages include finite-sample initialization noise and a regression-slope
  bias that the closed forms do not model; see the protocol note in fit/
  generator docs before comparing against theory columns.

Sweeps realize an alpha grid by rounding n at fixed d and record the realized
alpha. Rows are emitted in deterministic grid order whatever the worker
count, and all floats serialize with 17 significant digits so reruns are
byte-identical. Wall-clock columns default to 0 for the same reason; pass
timing=True to fill them (breaking byte-reproducibility).
"""
from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .config import ModelConfig
from .denoiser import fit, generated_distribution, generator_init, GeneratorInit
from .metrics import kl_decompose
from .model import TrainingSet, add_noise, sample_clean
from .rng import derive_seed, make_rng, worker_count
from .theory import kl_var_ridgeless, kl_var_theory, solve_renormalized_ridge

__all__ = [
    "ResultRow",
    "ChainRow",
    "SweepSpec",
    "run_trial",
    "run_sweep",
    "write_csv",
    "csv_text",
    "format_value",
    "SWEEPABLE",
]

SWEEPABLE = ("alpha", "lambda_hat", "T", "d", "n", "ridge_hat")


@dataclass(frozen=True)
class ResultRow:
    alpha: float
    lambda_hat: float
    T: float
    d: int
    n: int
    ridge_hat: float
    trial_index: int
    seed: int
    kl_mean: float
    kl_var: float
    kl_exact: float
    theory_order1: float
    theory_order2: float
    theory_total: float
    wall_time_ms: float


@dataclass(frozen=True)
class ChainRow:
    s: int
    beta: float
    lam: float
    C: int
    d: int
    n: int
    trial: int
    e_og: float
    wall_time_ms: float

    # Serialized column name for the noise scale (lam is a reserved word).
    _HEADER_OVERRIDES = {"lam": "lambda"}


@dataclass(frozen=True)
class SweepSpec:
    """A Cartesian parameter grid over a base configuration."""

    grids: Mapping[str, Sequence[float]]
    trials: int
    base: ModelConfig
    output_path: str | Path | None = None

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        unknown = set(self.grids) - set(SWEEPABLE)
        if unknown:
            raise ValueError(f"unknown sweep parameters: {sorted(unknown)}")
        if "alpha" in self.grids and "d" in self.grids and "n" in self.grids:
            raise ValueError(
                "cannot sweep alpha, d, and n together: fix one of d or n"
            )
        for name, values in self.grids.items():
            if len(values) == 0:
                raise ValueError(f"empty grid for {name}")


def _theory_columns(config: ModelConfig) -> tuple[float, float, float]:
    """(order1, order2, total) for the realized configuration."""
    alpha = config.alpha()
    if config.ridge_hat == 0.0:
        t = kl_var_ridgeless(alpha, config.lambda_hat, config.T, config.d)
        return t.order1, t.order2, t.total
    pair = solve_renormalized_ridge(config.ridge_hat, alpha, config.sigma_x_sq())
    total = kl_var_theory(pair, config.d, config.T, config.lambda_hat, config.sigma**2)
    # The series split only exists in the ridgeless limit.
    return math.nan, math.nan, total


def _matched_training_set(
    config: ModelConfig, rng: np.random.Generator
) -> tuple[TrainingSet, GeneratorInit]:
    """Draw (x, y) from the law assumed by the closed forms."""
    mu_x = math.exp(-config.T) * config.mu
    sigma_x_sq = config.sigma_x_sq()
    delta_t = config.delta_t()
    x = mu_x + math.sqrt(sigma_x_sq) * rng.standard_normal((config.n, config.d))
    y = math.exp(config.T) * x
    if delta_t > 0:
        y = y + math.sqrt(delta_t) * rng.standard_normal(x.shape)
    ts = TrainingSet(clean=y, noisy=x, delta_t=delta_t)
    init = GeneratorInit(
        mu_X=np.full(config.d, mu_x), sigma_X_sq=sigma_x_sq
    )
    return ts, init


def run_trial(
    config: ModelConfig, protocol: str = "matched", timing: bool = False
) -> ResultRow:
    """Execute one fit/generate/measure trial at config.seed."""
    if protocol not in ("matched", "forward"):
        raise ValueError(f"unknown protocol {protocol!r}")
    start = time.perf_counter()
    order1, order2, total = _theory_columns(config)
    rng = make_rng(config.seed)
    if protocol == "matched":
        ts, init = _matched_training_set(config, rng)
    else:
        clean = sample_clean(config, rng)
        ts = add_noise(clean, config.T, config.noise_scale(), rng)
        init = generator_init(ts, config.T)
    den = fit(ts, config.ridge_hat)
    gen = generated_distribution(den, init)
    report = kl_decompose(gen, np.full(config.d, float(config.mu)), config.sigma**2)
    elapsed_ms = (time.perf_counter() - start) * 1e3 if timing else 0.0
    return ResultRow(
        alpha=config.alpha(),
        lambda_hat=config.lambda_hat,
        T=config.T,
        d=config.d,
        n=config.n,
        ridge_hat=config.ridge_hat,
        trial_index=0,
        seed=config.seed,
        kl_mean=report.kl_mean,
        kl_var=report.kl_var,
        kl_exact=report.kl_exact,
        theory_order1=order1,
        theory_order2=order2,
        theory_total=total,
        wall_time_ms=elapsed_ms,
    )


def _error_row(config: ModelConfig, trial_index: int) -> ResultRow:
    nan = math.nan
    return ResultRow(
        alpha=config.alpha(),
        lambda_hat=config.lambda_hat,
        T=config.T,
        d=config.d,
        n=config.n,
        ridge_hat=config.ridge_hat,
        trial_index=trial_index,
        seed=config.seed,
        kl_mean=nan,
        kl_var=nan,
        kl_exact=nan,
        theory_order1=nan,
        theory_order2=nan,
        theory_total=nan,
        wall_time_ms=0.0,
    )


def _grid_points(spec: SweepSpec) -> list[ModelConfig]:
    """Expand the grid into concrete configurations, in deterministic order."""
    names = [name for name in SWEEPABLE if name in spec.grids]
    configs = []
    for combo in itertools.product(*(spec.grids[name] for name in names)):
        point = dict(zip(names, combo))
        base = spec.base
        if "alpha" in point:
            alpha = float(point.pop("alpha"))
            if alpha <= 0:
                raise ValueError(f"alpha grid values must be > 0, got {alpha}")
            if "n" in point:  # n swept: derive d instead
                point["d"] = max(1, round(int(point["n"]) * alpha))
            else:
                d = int(point.get("d", base.d))
                point["d"] = d
                point["n"] = max(1, round(d / alpha))  # realized alpha = d/n
        kwargs = {k: (int(v) if k in ("d", "n") else float(v)) for k, v in point.items()}
        configs.append(replace(base, **kwargs))
    return configs


def run_sweep(spec: SweepSpec, protocol: str = "matched", timing: bool = False) -> list[ResultRow]:
    """Grid x trials, deterministic substream per (grid index, trial index)."""
    points = _grid_points(spec)
    tasks = []
    for gi, point in enumerate(points):
        for ti in range(spec.trials):
            seed = derive_seed(spec.base.seed, gi, ti)
            tasks.append((gi, ti, replace(point, seed=seed)))

    def _one(task: tuple[int, int, ModelConfig]) -> ResultRow:
        gi, ti, config = task
        try:
            row = run_trial(config, protocol=protocol, timing=timing)
        except Exception:
            row = _error_row(config, ti)
        return replace(row, trial_index=ti)

    workers = min(worker_count(), len(tasks)) or 1
    if workers == 1:
        rows = [_one(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_one, tasks))
    # pool.map preserves task order, which is already (grid, trial) order
    if spec.output_path is not None:
        write_csv(rows, spec.output_path)
    return rows


def format_value(value: object) -> str:
    """Serialize one CSV cell; floats carry 17 significant digits."""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def _header_names(row_type: type) -> list[str]:
    overrides = getattr(row_type, "_HEADER_OVERRIDES", {})
    return [overrides.get(f.name, f.name) for f in fields(row_type)]


def csv_text(rows: Iterable[object], row_type: type = ResultRow) -> str:
    """Render dataclass rows as CSV: fixed header order, LF newlines."""
    rows = list(rows)
    if rows:
        row_type = type(rows[0])
    lines = [",".join(_header_names(row_type))]
    for row in rows:
        lines.append(
            ",".join(format_value(getattr(row, f.name)) for f in fields(row_type))
        )
    return "\n".join(lines) + "\n"


def write_csv(rows: Iterable[object], path: str | Path) -> None:
    """Write dataclass rows with a fixed header, LF newlines, UTF-8."""
    text = csv_text(rows)
    path = Path(path)
    try:
        path.write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc
