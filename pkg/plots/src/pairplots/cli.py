"""Command-line figure rendering for pairselect CSV outputs.

Series are declared by repeating --csv (one file per curve) or by giving
one --csv with several --y columns (one curve per column, e.g. the three
curves of a bound growth table). --where filters rows before plotting,
typically ``--where trial=AGG`` to keep only the aggregate rows of an
experiment sweep.
"""

from __future__ import annotations

import argparse
import sys

from .render import PlotsError, PlotSpec, SeriesSpec, render_curves


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pairplot",
        description="Render line figures from pairselect result/bound CSV files.",
    )
    parser.add_argument("--csv", action="append", required=True, help="input CSV (repeatable)")
    parser.add_argument("--y", action="append", required=True, help="y column (repeatable)")
    parser.add_argument("--label", action="append", default=None, help="legend label (repeatable)")
    parser.add_argument("--x", required=True, help="x column")
    parser.add_argument("--out", required=True, help="output image path (PNG)")
    parser.add_argument("--where", action="append", default=[], help="row filter col=value")
    parser.add_argument("--logx", action="store_true")
    parser.add_argument("--logy", action="store_true")
    parser.add_argument("--xlabel", default=None)
    parser.add_argument("--ylabel", default=None)
    parser.add_argument("--title", default=None)
    return parser


def spec_from_args(args) -> PlotSpec:
    csvs, ys = args.csv, args.y
    if len(csvs) == 1 and len(ys) >= 1:
        pairs = [(csvs[0], y) for y in ys]
    elif len(ys) == 1:
        pairs = [(path, ys[0]) for path in csvs]
    elif len(ys) == len(csvs):
        pairs = list(zip(csvs, ys))
    else:
        raise PlotsError(
            f"cannot pair {len(csvs)} CSV files with {len(ys)} y columns "
            "(use one file, one column, or equal counts)"
        )
    labels = args.label or []
    if labels and len(labels) != len(pairs):
        raise PlotsError(f"got {len(labels)} labels for {len(pairs)} series")
    if not labels:
        if len(csvs) == 1:
            labels = [y for _, y in pairs]
        else:
            labels = [path.rsplit("/", 1)[-1].removesuffix(".csv") for path, _ in pairs]
    where = []
    for clause in args.where:
        if "=" not in clause:
            raise PlotsError(f"--where needs col=value, got {clause!r}")
        col, value = clause.split("=", 1)
        where.append((col, value))
    return PlotSpec(
        series=tuple(SeriesSpec(path, y, label) for (path, y), label in zip(pairs, labels)),
        x_field=args.x,
        out_path=args.out,
        log_x=args.logx,
        log_y=args.logy,
        x_label=args.xlabel,
        y_label=args.ylabel,
        title=args.title,
        where=tuple(where),
    )


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        path = render_curves(spec_from_args(args))
    except PlotsError as exc:
        print(f"pairplot: error: {exc}", file=sys.stderr)
        return 1
    print(path)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
