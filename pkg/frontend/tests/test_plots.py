import csv
import math
import statistics
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np
import pytest

from lindiff_plots import CHART_KINDS, PlotRequest, render
from lindiff_plots.cli import main

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(autouse=True)
def _close_figures():
    yield
    plt.close("all")


def _fixture_for(kind: str) -> Path:
    return {
        "kl_vs_lambda": FIXTURES / "sweep_lambda.csv",
        "kl_per_d_vs_alpha": FIXTURES / "sweep_alpha.csv",
        "eog_vs_steps": FIXTURES / "chain.csv",
    }[kind]


def _grouped_means(path: Path, x: str, y: str, scale_by: str | None = None):
    groups: dict[float, list[float]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            xv, yv = float(row[x]), float(row[y])
            if scale_by is not None:
                yv /= float(row[scale_by])
            if math.isfinite(xv) and math.isfinite(yv):
                groups.setdefault(xv, []).append(yv)
    return {k: statistics.fmean(v) for k, v in sorted(groups.items())}


@pytest.mark.parametrize("kind", CHART_KINDS)
def test_every_chart_kind_renders_a_nonempty_image(tmp_path, kind):
    out = tmp_path / f"{kind}.png"
    fig = render(PlotRequest(_fixture_for(kind), kind, out))
    assert out.exists() and out.stat().st_size > 0
    assert fig.axes


def test_marker_series_round_trips_the_grouped_means(tmp_path):
    src = FIXTURES / "sweep_lambda.csv"
    fig = render(PlotRequest(src, "kl_vs_lambda", tmp_path / "rt.png"))
    expected = _grouped_means(src, "lambda_hat", "kl_var")
    container = fig.axes[0].containers[0]
    data_line = container.lines[0]
    assert np.allclose(data_line.get_xdata(), list(expected.keys()))
    assert np.allclose(data_line.get_ydata(), list(expected.values()))


def test_theory_line_splits_at_the_pole_with_distinct_styles(tmp_path):
    src = FIXTURES / "sweep_alpha.csv"
    fig = render(PlotRequest(src, "kl_per_d_vs_alpha", tmp_path / "alpha.png"))
    ax = fig.axes[0]
    theory = {
        ln.get_label(): ln for ln in ax.get_lines() if "theory" in ln.get_label()
    }
    assert set(theory) == {"theory (alpha < 1)", "theory (alpha > 1)"}
    below, above = theory["theory (alpha < 1)"], theory["theory (alpha > 1)"]
    assert max(below.get_xdata()) < 1.0
    assert min(above.get_xdata()) > 1.0
    assert below.get_color() != above.get_color()


def test_non_finite_rows_are_dropped_not_plotted(tmp_path):
    # The alpha fixture contains failed-trial rows at alpha=1 with NaN
    # results; neither markers nor theory segments may include them.
    src = FIXTURES / "sweep_alpha.csv"
    fig = render(PlotRequest(src, "kl_per_d_vs_alpha", tmp_path / "alpha.png"))
    markers = fig.axes[0].containers[0].lines[0]
    assert np.allclose(markers.get_xdata(), [0.25, 0.5, 2.0, 4.0])
    assert np.isfinite(np.asarray(markers.get_ydata(), dtype=float)).all()


def test_marker_means_match_per_dimension_scaling(tmp_path):
    src = FIXTURES / "sweep_alpha.csv"
    fig = render(PlotRequest(src, "kl_per_d_vs_alpha", tmp_path / "alpha.png"))
    expected = _grouped_means(src, "alpha", "kl_var", scale_by="d")
    markers = fig.axes[0].containers[0].lines[0]
    assert np.allclose(markers.get_ydata(), list(expected.values()))


def test_chain_chart_draws_one_series_per_component_count(tmp_path):
    src = FIXTURES / "chain.csv"
    fig = render(PlotRequest(src, "eog_vs_steps", tmp_path / "chain.png"))
    containers = fig.axes[0].containers
    assert len(containers) == 2
    labels = {c.get_label() for c in containers}
    assert labels == {"C = 1, mean ± SE", "C = 2, mean ± SE"}
    for container in containers:
        assert np.allclose(container.lines[0].get_xdata(), [2.0, 5.0])


def test_missing_column_error_names_the_column(tmp_path):
    with pytest.raises(ValueError, match="theory_total"):
        render(
            PlotRequest(
                FIXTURES / "bad_columns.csv", "kl_vs_lambda", tmp_path / "x.png"
            )
        )


def test_header_only_csv_is_an_explicit_error(tmp_path):
    with pytest.raises(ValueError, match="zero data rows"):
        render(
            PlotRequest(
                FIXTURES / "header_only.csv", "kl_vs_lambda", tmp_path / "x.png"
            )
        )


def test_all_nan_rows_are_an_explicit_error(tmp_path):
    src = tmp_path / "nan.csv"
    src.write_text(
        "lambda_hat,kl_var,theory_total\n0.02,nan,nan\n0.05,nan,nan\n",
        encoding="utf-8",
    )
    with pytest.raises(ValueError, match="no finite data rows"):
        render(PlotRequest(src, "kl_vs_lambda", tmp_path / "x.png"))


def test_request_validation():
    with pytest.raises(ValueError, match="chart_kind"):
        PlotRequest("a.csv", "pie", "b.png")
    with pytest.raises(ValueError, match="log_axes"):
        PlotRequest("a.csv", "kl_vs_lambda", "b.png", log_axes=(True,))


def test_rendering_is_deterministic(tmp_path):
    paths = []
    for name in ("a.png", "b.png"):
        out = tmp_path / name
        render(
            PlotRequest(
                FIXTURES / "sweep_lambda.csv",
                "kl_vs_lambda",
                out,
                log_axes=(True, True),
            )
        )
        paths.append(out)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_cli_renders_and_reports_errors(tmp_path, capsys):
    out = tmp_path / "cli.png"
    code = main([str(_fixture_for("kl_vs_lambda")), "kl_vs_lambda", str(out)])
    assert code == 0
    assert out.exists() and out.stat().st_size > 0

    code = main(
        [str(FIXTURES / "bad_columns.csv"), "kl_vs_lambda", str(tmp_path / "y.png")]
    )
    assert code == 1
    assert "theory_total" in capsys.readouterr().err

    with pytest.raises(SystemExit):
        main([str(_fixture_for("kl_vs_lambda")), "pie", str(tmp_path / "z.png")])
