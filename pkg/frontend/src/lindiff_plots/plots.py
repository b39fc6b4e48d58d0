"""Chart rendering for lindiff CSV output.

Three chart kinds, all driven purely by the CSV contents and the request:

- ``kl_vs_lambda``: measured variance-term KL against the noise parameter,
  grid-point means with standard-error bars, closed-form prediction as a
  dashed line.
- ``kl_per_d_vs_alpha``: per-dimension variance-term KL against the aspect
  ratio; the prediction diverges at alpha = 1, so the theory line is drawn
  as two distinctly styled segments that never cross the pole.
- ``eog_vs_steps``: chain smoothed-marginal error against step count, one
  marker series per mixture-component count when a ``C`` column is present.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

CHART_KINDS = ("kl_vs_lambda", "kl_per_d_vs_alpha", "eog_vs_steps")

_REQUIRED = {
    "kl_vs_lambda": ("lambda_hat", "kl_var", "theory_total"),
    "kl_per_d_vs_alpha": ("alpha", "d", "kl_var", "theory_total"),
    "eog_vs_steps": ("s", "e_og"),
}

_SIM_STYLE = dict(fmt="o", capsize=3, markersize=5)


@dataclass(frozen=True)
class PlotRequest:
    csv_path: str | Path
    chart_kind: str
    output_image_path: str | Path
    log_axes: tuple[bool, bool] = (False, False)

    def __post_init__(self) -> None:
        if self.chart_kind not in CHART_KINDS:
            raise ValueError(
                f"chart_kind must be one of {CHART_KINDS}, got {self.chart_kind!r}"
            )
        if len(tuple(self.log_axes)) != 2:
            raise ValueError("log_axes must be a (log_x, log_y) pair of booleans")


def _read_rows(path: str | Path, kind: str) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in _REQUIRED[kind] if c not in header]
        if missing:
            raise ValueError(
                f"{path} is missing required column(s) for {kind}: "
                + ", ".join(missing)
            )
        rows = list(reader)
    if not rows:
        raise ValueError(f"{path} contains zero data rows")
    return rows


def _column(rows: list[dict[str, str]], name: str) -> np.ndarray:
    return np.array([float(r[name]) for r in rows], dtype=float)


def _mean_se(xs: np.ndarray, ys: np.ndarray):
    """Per-unique-x mean and standard error, in ascending x order."""
    grid, means, ses = [], [], []
    for x in sorted(set(xs.tolist())):
        vals = ys[xs == x]
        grid.append(x)
        means.append(float(np.mean(vals)))
        ses.append(
            float(np.std(vals, ddof=1) / math.sqrt(len(vals)))
            if len(vals) > 1
            else 0.0
        )
    return grid, means, ses


def _require_finite(mask: np.ndarray, kind: str) -> None:
    if not mask.any():
        raise ValueError(f"no finite data rows for {kind}")


def _draw_lambda(ax, rows) -> None:
    lam = _column(rows, "lambda_hat")
    kl = _column(rows, "kl_var")
    theory = _column(rows, "theory_total")
    keep = np.isfinite(lam) & np.isfinite(kl)
    _require_finite(keep, "kl_vs_lambda")
    xs, means, ses = _mean_se(lam[keep], kl[keep])
    ax.errorbar(xs, means, yerr=ses, label="simulation mean ± SE", **_SIM_STYLE)
    tkeep = np.isfinite(lam) & np.isfinite(theory)
    if tkeep.any():
        txs, tvals, _ = _mean_se(lam[tkeep], theory[tkeep])
        ax.plot(txs, tvals, "k--", label="theory")
    ax.set_xlabel("lambda_hat")
    ax.set_ylabel("kl_var")


def _draw_alpha(ax, rows) -> None:
    alpha = _column(rows, "alpha")
    dim = _column(rows, "d")
    kl = _column(rows, "kl_var")
    theory = _column(rows, "theory_total")
    valid = np.isfinite(alpha) & np.isfinite(dim) & (dim > 0)
    keep = valid & np.isfinite(kl)
    _require_finite(keep, "kl_per_d_vs_alpha")
    per_d = np.divide(kl, dim, out=np.full_like(kl, np.nan), where=dim > 0)
    xs, means, ses = _mean_se(alpha[keep], per_d[keep])
    ax.errorbar(xs, means, yerr=ses, label="simulation mean ± SE", **_SIM_STYLE)
    theory_per_d = np.divide(
        theory, dim, out=np.full_like(theory, np.nan), where=dim > 0
    )
    tkeep = valid & np.isfinite(theory) & (alpha != 1.0)
    # The prediction has a pole at alpha = 1: one segment per side, styled
    # distinctly, never joined across the pole.
    for mask, color, label in (
        (alpha < 1.0, "black", "theory (alpha < 1)"),
        (alpha > 1.0, "tab:blue", "theory (alpha > 1)"),
    ):
        seg = tkeep & mask
        if seg.any():
            txs, tvals, _ = _mean_se(alpha[seg], theory_per_d[seg])
            ax.plot(txs, tvals, color=color, linestyle="-", label=label)
    ax.set_xlabel("alpha")
    ax.set_ylabel("kl_var / d")


def _draw_steps(ax, rows) -> None:
    steps = _column(rows, "s")
    err = _column(rows, "e_og")
    keep = np.isfinite(steps) & np.isfinite(err)
    _require_finite(keep, "eog_vs_steps")
    if "C" in rows[0]:
        comp = _column(rows, "C")
        for c in sorted(set(comp[keep].tolist())):
            sel = keep & (comp == c)
            xs, means, ses = _mean_se(steps[sel], err[sel])
            ax.errorbar(
                xs, means, yerr=ses, label=f"C = {c:g}, mean ± SE", **_SIM_STYLE
            )
    else:
        xs, means, ses = _mean_se(steps[keep], err[keep])
        ax.errorbar(xs, means, yerr=ses, label="mean ± SE", **_SIM_STYLE)
    ax.set_xlabel("s")
    ax.set_ylabel("e_og")


_DRAWERS = {
    "kl_vs_lambda": _draw_lambda,
    "kl_per_d_vs_alpha": _draw_alpha,
    "eog_vs_steps": _draw_steps,
}


def render(request: PlotRequest):
    """Write the requested chart and return the matplotlib figure.

    The output is a pure function of the CSV contents and the request; SVG
    output drops the date stamp so reruns are byte-identical.
    """
    rows = _read_rows(request.csv_path, request.chart_kind)
    fig, ax = plt.subplots(figsize=(6.0, 4.0), dpi=120)
    try:
        _DRAWERS[request.chart_kind](ax, rows)
        log_x, log_y = request.log_axes
        if log_x:
            ax.set_xscale("log")
        if log_y:
            ax.set_yscale("log")
        ax.set_title(request.chart_kind.replace("_", " "))
        ax.grid(True, alpha=0.3)
        ax.legend()
        fig.tight_layout()
        out = Path(request.output_image_path)
        metadata = {"Date": None} if out.suffix.lower() == ".svg" else None
        fig.savefig(out, metadata=metadata)
    except Exception:
        plt.close(fig)
        raise
    return fig
