"""Command-line entry: lindiff-plot CSV KIND OUTPUT [--log-x] [--log-y]."""

from __future__ import annotations

import argparse
import sys
from collections.abc import Sequence

import matplotlib.pyplot as plt

from .plots import CHART_KINDS, PlotRequest, render


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="lindiff-plot",
        description="Render a lindiff sweep or chain CSV into a static chart.",
    )
    parser.add_argument("csv", help="input CSV written by the lindiff harness")
    parser.add_argument("kind", choices=CHART_KINDS, help="chart kind")
    parser.add_argument("output", help="output image path (.png, .svg, .pdf)")
    parser.add_argument("--log-x", action="store_true", help="log-scale x axis")
    parser.add_argument("--log-y", action="store_true", help="log-scale y axis")
    args = parser.parse_args(argv)
    request = PlotRequest(
        csv_path=args.csv,
        chart_kind=args.kind,
        output_image_path=args.output,
        log_axes=(args.log_x, args.log_y),
    )
    try:
        fig = render(request)
    except (ValueError, OSError) as exc:
        print(f"lindiff-plot: {exc}", file=sys.stderr)
        return 1
    plt.close(fig)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
