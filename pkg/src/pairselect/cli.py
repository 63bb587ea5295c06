"""Command-line interface.

Subcommands:
  run        run a JSON-configured experiment, write the results CSV
  bounds     tabulate complexity-bound growth curves as CSV
  validate   report transitivity verdicts for a matrix or .pwg file as JSON
  parse-pwg  print the normalized {n, labels, p} JSON of a .pwg file

Exit codes: 0 success, 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .bounds import THETA_NOTE, growth_table
from .core import CyclicPreferenceError, NotStrictOrderError, PairSelectError
from .harness import ExperimentConfig, run_experiment, write_csv
from .ingest import borda_ranking, load_instance_file, parse_pwg, to_preference_instance
from .verify import validate_gamma, validate_sst, validate_sti


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pairselect",
        description="Active best-k selection from noisy pairwise comparisons.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment from a JSON config")
    run_p.add_argument("--config", required=True, help="config path, or '-' for stdin")
    run_p.add_argument("--out", required=True, help="output CSV path, or '-' for stdout")
    run_p.add_argument("--workers", type=int, default=None, help="worker processes")
    run_p.add_argument(
        "--timings",
        action="store_true",
        help="populate the elapsed column (machine-dependent; breaks byte-identical reruns)",
    )

    bounds_p = sub.add_parser("bounds", help="tabulate bound growth curves")
    bounds_p.add_argument("--gap", type=float, required=True, help="uniform per-item gap")
    bounds_p.add_argument("--delta", type=float, required=True, help="confidence parameter")
    bounds_p.add_argument("--k", type=int, default=1)
    bounds_p.add_argument(
        "--n-grid",
        required=True,
        help="item counts: 'lo:hi:log[:points]', 'lo:hi:lin[:points]', or 'a,b,c'",
    )
    bounds_p.add_argument("--out", default="-", help="output CSV path, or '-' for stdout")

    val_p = sub.add_parser("validate", help="transitivity verdicts for an instance")
    src = val_p.add_mutually_exclusive_group(required=True)
    src.add_argument("--pwg", help="PrefLib pairwise file")
    src.add_argument("--matrix", help="normalized {n, labels, p} JSON file")
    val_p.add_argument("--gamma", type=float, default=None, help="relaxation factor to test")
    val_p.add_argument(
        "--missing",
        choices=("error", "half"),
        default="half",
        help="handling of vote-less pairs in .pwg input (default: half)",
    )

    pwg_p = sub.add_parser("parse-pwg", help="print normalized instance JSON")
    pwg_p.add_argument("path", help="PrefLib pairwise file")
    pwg_p.add_argument("--missing", choices=("error", "half"), default="error")
    return parser


def parse_n_grid(text: str) -> list[int]:
    """Grid spec: 'a,b,c' list, or 'lo:hi:log[:points]' / 'lo:hi:lin[:points]'."""
    import numpy as np

    if ":" not in text:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    parts = text.split(":")
    if len(parts) not in (3, 4):
        raise ValueError(f"bad n-grid spec {text!r}")
    lo, hi, scale = int(parts[0]), int(parts[1]), parts[2]
    points = int(parts[3]) if len(parts) == 4 else 25
    if scale == "log":
        values = np.geomspace(lo, hi, num=points)
    elif scale in ("lin", "linear"):
        values = np.linspace(lo, hi, num=points)
    else:
        raise ValueError(f"n-grid scale must be 'log' or 'lin', got {scale!r}")
    grid = sorted({int(round(v)) for v in values})
    return grid


def _open_out(path: str):
    if path == "-":
        return sys.stdout, False
    return open(path, "w", newline=""), True


def _cmd_run(args) -> int:
    if args.config == "-":
        raw = sys.stdin.read()
    else:
        with open(args.config) as handle:
            raw = handle.read()
    config = ExperimentConfig.from_dict(json.loads(raw))
    points = run_experiment(config, workers=args.workers)
    handle, owned = _open_out(args.out)
    try:
        write_csv(points, handle, include_timings=args.timings)
    finally:
        if owned:
            handle.close()
    return 0


def _cmd_bounds(args) -> int:
    grid = parse_n_grid(args.n_grid)
    rows = growth_table(args.gap, args.delta, args.k, grid)
    handle, owned = _open_out(args.out)
    try:
        handle.write(f"# {THETA_NOTE}\n")
        handle.write("n,lower,upper_k1,upper_kgt1\n")
        for row in rows:
            handle.write(f"{row.n},{row.lower!r},{row.upper_k1!r},{row.upper_kgt1!r}\n")
    finally:
        if owned:
            handle.close()
    return 0


def _cmd_validate(args) -> int:
    if args.pwg:
        instance = load_instance_file(args.pwg, missing_policy=args.missing)
    else:
        instance = load_instance_file(args.matrix)
    sst = validate_sst(instance)
    sti = validate_sti(instance)
    report = {
        "n": instance.n,
        "strict_order": instance.strict_order,
        "sst": sst.passed,
        "sti": sti.passed,
    }
    if not sst.passed:
        report["sst_witness"] = sst.witness
    if not sti.passed:
        report["sti_witness"] = sti.witness
    if args.gamma is not None:
        try:
            verdict = validate_gamma(instance, args.gamma)
        except (NotStrictOrderError, CyclicPreferenceError):
            # No tournament order; score triples along the Borda order instead.
            ranking, _ = borda_ranking(instance)
            verdict = validate_gamma(instance, args.gamma, ranking=ranking)
            report["gamma_ranking"] = "borda"
        report["gamma"] = args.gamma
        report["gamma_pass"] = verdict.passed
        report["gamma_minimal"] = verdict.minimal_gamma
    json.dump(report, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def _cmd_parse_pwg(args) -> int:
    with open(args.path, "rb") as handle:
        doc = parse_pwg(handle)
    instance = to_preference_instance(doc, missing_policy=args.missing)
    payload = {
        "n": doc.n,
        "labels": list(doc.labels),
        "p": [[float(x) for x in row] for row in instance.p],
    }
    json.dump(payload, sys.stdout)
    sys.stdout.write("\n")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "bounds":
            return _cmd_bounds(args)
        if args.command == "validate":
            return _cmd_validate(args)
        return _cmd_parse_pwg(args)
    except (PairSelectError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"pairselect: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
