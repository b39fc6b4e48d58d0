"""Static charts from lindiff CSV output.

This package consumes only the CSV files the lindiff harness writes; it
never imports the lindiff package itself, so either side builds and tests
independently.
"""

from .plots import CHART_KINDS, PlotRequest, render

__all__ = ["CHART_KINDS", "PlotRequest", "render"]
