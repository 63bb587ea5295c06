"""Batch figure rendering for pairselect CSV outputs."""

from .render import PlotsError, PlotSpec, SeriesSpec, build_figure, read_rows, render_curves

__version__ = "0.1.0"
