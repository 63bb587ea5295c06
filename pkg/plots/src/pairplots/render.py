"""Render line figures from pairselect CSV files.

Works purely from the documented CSV schemas (experiment results with
trial/aggregate rows; bound growth tables with a leading ``#`` comment
line) — all numbers originate upstream, nothing is computed here beyond
selecting columns. Rendering is deterministic: fixed figure geometry, a
pinned metadata string, and no timestamps, so re-rendering identical
inputs reproduces identical bytes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

FIGSIZE = (6.4, 4.2)
DPI = 150
MARKERS = ("o", "s", "^", "D", "v", "x", "+", "*")


class PlotsError(Exception):
    """Bad plot request: missing file, unknown field, or no data rows."""


@dataclass(frozen=True)
class SeriesSpec:
    """One curve: a CSV file, the y column, and a legend label."""

    csv_path: str
    y_field: str
    label: str


@dataclass(frozen=True)
class PlotSpec:
    """A full figure: series, shared x column, scales, and the output path."""

    series: tuple[SeriesSpec, ...]
    x_field: str
    out_path: str
    log_x: bool = False
    log_y: bool = False
    x_label: str | None = None
    y_label: str | None = None
    title: str | None = None
    where: tuple[tuple[str, str], ...] = field(default=())


def read_rows(path: str) -> list[dict[str, str]]:
    """CSV rows as dicts; lines starting with '#' are comments."""
    try:
        with open(path, newline="") as handle:
            lines = [line for line in handle if not line.startswith("#")]
    except OSError as exc:
        raise PlotsError(f"cannot read {path}: {exc}") from exc
    rows = list(csv.DictReader(lines))
    if not rows:
        raise PlotsError(f"{path}: no data rows")
    return rows


def series_points(
    spec: SeriesSpec, x_field: str, where: tuple[tuple[str, str], ...]
) -> tuple[list[float], list[float]]:
    rows = read_rows(spec.csv_path)
    header = rows[0].keys()
    for name in (x_field, spec.y_field) + tuple(col for col, _ in where):
        if name not in header:
            raise PlotsError(
                f"{spec.csv_path}: no column {name!r} (have {', '.join(header)})"
            )
    kept = [row for row in rows if all(row[col] == val for col, val in where)]
    if not kept:
        raise PlotsError(f"{spec.csv_path}: filter removed every row")
    points = []
    for row in kept:
        try:
            points.append((float(row[x_field]), float(row[spec.y_field])))
        except ValueError as exc:
            raise PlotsError(
                f"{spec.csv_path}: non-numeric value in {x_field!r}/{spec.y_field!r}: {exc}"
            ) from exc
    points.sort(key=lambda xy: xy[0])
    xs, ys = zip(*points)
    return list(xs), list(ys)


def build_figure(spec: PlotSpec):
    """Assemble the matplotlib figure (separated from saving for testability)."""
    if not spec.series:
        raise PlotsError("need at least one series")
    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)
    for index, series in enumerate(spec.series):
        xs, ys = series_points(series, spec.x_field, spec.where)
        ax.plot(xs, ys, marker=MARKERS[index % len(MARKERS)], label=series.label)
    if spec.log_x:
        ax.set_xscale("log")
    if spec.log_y:
        ax.set_yscale("log")
    ax.set_xlabel(spec.x_label or spec.x_field)
    ax.set_ylabel(spec.y_label or (spec.series[0].y_field if spec.series else ""))
    if spec.title:
        ax.set_title(spec.title)
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return fig


def render_curves(spec: PlotSpec) -> str:
    """Render the figure to ``spec.out_path`` (PNG); returns the path."""
    fig = build_figure(spec)
    try:
        fig.savefig(spec.out_path, metadata={"Software": "pairplot"})
    finally:
        plt.close(fig)
    return spec.out_path
