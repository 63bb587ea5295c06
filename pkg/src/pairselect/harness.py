"""Seeded multi-trial experiment runner.

A JSON config names an instance spec, an algorithm id, selection parameters,
a trial count, a master seed, and optionally a sweep axis. Each (sweep point,
trial) pair gets independent random streams derived from
``SeedSequence((master_seed, sweep_index, trial_index))`` — one child stream
each for instance generation, oracle queries, and algorithm randomness — so
results are identical under any worker count or execution order. Trials are
verified against their generating instance (approximate optimality at the
configured tolerance, exact match against the true ranking — the tournament
order when it exists, otherwise the Borda order) and written to a fixed CSV
schema with one aggregate row per sweep point.

Wall time is measured per trial but the CSV ``elapsed`` column is only
populated on request (``include_timings``): timings are machine-dependent
and would break the byte-identical-output determinism contract.
"""

from __future__ import annotations

import csv
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import (
    CyclicPreferenceError,
    NotStrictOrderError,
    PairSelectError,
    PreferenceInstance,
    SelectionParams,
    ranking_of,
)
from .ingest import borda_ranking
from .oracle import InstanceSpec, MatrixOracle
from .selection import (
    elimination_best_select,
    elimination_k_select,
    epsilon_quick_select,
    tournament_k_select,
)
from .verify import is_eps_k_optimal

ALGORITHMS = ("eqs", "tks", "seebs", "seeks", "seeks_v2")
SWEEP_AXES = ("n", "k", "epsilon")
CSV_HEADER = (
    "sweep_axis",
    "sweep_value",
    "trial",
    "seed",
    "comparisons",
    "pac_correct",
    "exact_correct",
    "elapsed",
    "comparisons_std",
)
WORKERS_ENV = "RANK_THREADS"


class ConfigError(PairSelectError, ValueError):
    """Invalid experiment configuration; the message carries the field path."""


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: tuple

    def __post_init__(self) -> None:
        if self.axis not in SWEEP_AXES:
            raise ConfigError(f"sweep.axis: must be one of {SWEEP_AXES}, got {self.axis!r}")
        if not self.values:
            raise ConfigError("sweep.values: must be non-empty")


@dataclass(frozen=True)
class ExperimentConfig:
    instance: InstanceSpec
    algorithm: str
    params: SelectionParams
    trials: int
    master_seed: int
    sweep: SweepSpec | None = None

    def __post_init__(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(
                f"algorithm: must be one of {ALGORITHMS}, got {self.algorithm!r}"
            )
        if self.trials < 0:
            raise ConfigError(f"trials: must be >= 0, got {self.trials}")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("master_seed: must be a 64-bit unsigned integer")
        if self.algorithm in ("eqs", "tks") and self.params.epsilon is None:
            raise ConfigError(f"params.epsilon: required for algorithm {self.algorithm!r}")
        for sweep_index in range(len(self.sweep.values) if self.sweep else 1):
            try:
                spec, params = resolve_point(self, sweep_index)
                n = spec.item_count()
            except ConfigError:
                raise
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"sweep.values[{sweep_index}]: {exc}") from exc
            if self.algorithm == "seebs" and params.k != 1:
                raise ConfigError("params.k: seebs selects a single item; set k = 1")
            if params.k > n / 2.0:
                raise ConfigError(
                    f"params.k: top-level calls need k <= n/2, got k={params.k}, n={n}"
                )

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config: must be a JSON object")
        known = {"instance", "algorithm", "params", "trials", "master_seed", "sweep"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"{sorted(unknown)[0]}: unknown field")
        for name in ("instance", "algorithm", "params", "trials", "master_seed"):
            if name not in data:
                raise ConfigError(f"{name}: required field missing")
        try:
            instance = InstanceSpec.from_dict(data["instance"])
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from exc
        params_data = data["params"]
        if not isinstance(params_data, dict) or "k" not in params_data or "delta" not in params_data:
            raise ConfigError("params: must be an object with fields k and delta")
        try:
            params = SelectionParams(
                k=int(params_data["k"]),
                delta=float(params_data["delta"]),
                epsilon=(
                    float(params_data["epsilon"])
                    if params_data.get("epsilon") is not None
                    else None
                ),
            )
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"params: {exc}") from exc
        sweep = None
        if data.get("sweep") is not None:
            sweep_data = data["sweep"]
            if not isinstance(sweep_data, dict) or "axis" not in sweep_data or "values" not in sweep_data:
                raise ConfigError("sweep: must be an object with fields axis and values")
            sweep = SweepSpec(axis=sweep_data["axis"], values=tuple(sweep_data["values"]))
        return cls(
            instance=instance,
            algorithm=data["algorithm"],
            params=params,
            trials=int(data["trials"]),
            master_seed=int(data["master_seed"]),
            sweep=sweep,
        )

    def to_dict(self) -> dict:
        params: dict = {"k": self.params.k, "delta": self.params.delta}
        if self.params.epsilon is not None:
            params["epsilon"] = self.params.epsilon
        out = {
            "instance": self.instance.to_dict(),
            "algorithm": self.algorithm,
            "params": params,
            "trials": self.trials,
            "master_seed": self.master_seed,
        }
        if self.sweep is not None:
            out["sweep"] = {"axis": self.sweep.axis, "values": list(self.sweep.values)}
        return out


@dataclass(frozen=True)
class TrialReport:
    trial_index: int
    seed: int
    comparisons: int
    elapsed: float
    pac_correct: bool
    exact_correct: bool
    returned: tuple[int, ...]
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class Aggregate:
    trials: int
    comparisons_mean: float | None
    comparisons_std: float | None
    pac_rate: float | None
    exact_rate: float | None
    elapsed_mean: float | None


@dataclass(frozen=True)
class PointResult:
    axis: str | None
    value: object
    reports: tuple[TrialReport, ...]
    aggregate: Aggregate


def resolve_point(
    config: ExperimentConfig, sweep_index: int
) -> tuple[InstanceSpec, SelectionParams]:
    """Instance spec and params at one sweep point."""
    spec = config.instance
    params = config.params
    if config.sweep is None:
        return spec, params
    value = config.sweep.values[sweep_index]
    axis = config.sweep.axis
    if axis == "n":
        spec = spec.with_n(int(value))
    elif axis == "k":
        params = SelectionParams(k=int(value), delta=params.delta, epsilon=params.epsilon)
    else:
        params = SelectionParams(k=params.k, delta=params.delta, epsilon=float(value))
    return spec, params


def ground_truth_ranking(instance: PreferenceInstance):
    """Tournament ranking when the beats-relation is a total order, else Borda."""
    try:
        return ranking_of(instance)
    except (NotStrictOrderError, CyclicPreferenceError):
        return borda_ranking(instance)[0]


def run_trial(config: ExperimentConfig, sweep_index: int, trial_index: int) -> TrialReport:
    """Execute one seeded trial and verify it against its generating instance."""
    spec, params = resolve_point(config, sweep_index)
    root = np.random.SeedSequence(entropy=(config.master_seed, sweep_index, trial_index))
    seed_value = int(root.generate_state(1, np.uint64)[0])
    instance_ss, oracle_ss, algo_ss = root.spawn(3)
    instance = spec.build_instance(np.random.default_rng(instance_ss))
    oracle = MatrixOracle(instance, np.random.default_rng(oracle_ss))
    rng = np.random.default_rng(algo_ss)
    items = range(instance.n)

    started = time.perf_counter()
    if config.algorithm == "eqs":
        result = epsilon_quick_select(
            oracle, items, params.k, params.epsilon, params.delta, rng
        )
    elif config.algorithm == "tks":
        result = tournament_k_select(
            oracle, items, params.k, params.epsilon, params.delta, rng
        )
    elif config.algorithm == "seebs":
        if params.k != 1:
            raise ConfigError("params.k: seebs selects a single item; set k = 1")
        result = elimination_best_select(oracle, items, params.delta, rng)
    elif config.algorithm == "seeks":
        result = elimination_k_select(
            oracle, items, params.k, params.delta, rng, pac_selector="tks"
        )
    else:
        result = elimination_k_select(
            oracle, items, params.k, params.delta, rng, pac_selector="eqs"
        )
    elapsed = time.perf_counter() - started

    if result.comparisons != oracle.count:
        raise RuntimeError(
            f"comparison accounting mismatch: result={result.comparisons}, "
            f"oracle={oracle.count}"
        )
    truth = ground_truth_ranking(instance)
    exact_correct = result.selected == truth.top(params.k)
    pac_eps = params.epsilon if params.epsilon is not None else 0.0
    pac_correct = is_eps_k_optimal(instance, result.selected, pac_eps).passed
    return TrialReport(
        trial_index=trial_index,
        seed=seed_value,
        comparisons=result.comparisons,
        elapsed=elapsed,
        pac_correct=pac_correct,
        exact_correct=exact_correct,
        returned=tuple(sorted(result.selected)),
        flags=result.flags,
    )


def _aggregate(reports: tuple[TrialReport, ...]) -> Aggregate:
    count = len(reports)
    if count == 0:
        return Aggregate(0, None, None, None, None, None)
    total = sum(r.comparisons for r in reports)  # exact integer sum
    mean = total / count
    variance = sum((r.comparisons - mean) ** 2 for r in reports) / count
    return Aggregate(
        trials=count,
        comparisons_mean=mean,
        comparisons_std=math.sqrt(variance),
        pac_rate=sum(r.pac_correct for r in reports) / count,
        exact_rate=sum(r.exact_correct for r in reports) / count,
        elapsed_mean=sum(r.elapsed for r in reports) / count,
    )


def _worker_count(workers: int | None) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return min(os.cpu_count() or 1, 8)


def _run_point_trial(args) -> tuple[int, int, TrialReport]:
    config, sweep_index, trial_index = args
    return sweep_index, trial_index, run_trial(config, sweep_index, trial_index)


def run_experiment(
    config: ExperimentConfig, workers: int | None = None
) -> list[PointResult]:
    """Run every (sweep point, trial) pair and aggregate per point.

    ``workers`` > 1 runs trials in a process pool; output is sorted by
    (sweep point, trial index) and independent of scheduling.
    """
    points = config.sweep.values if config.sweep else (None,)
    tasks = [
        (config, sweep_index, trial_index)
        for sweep_index in range(len(points))
        for trial_index in range(config.trials)
    ]
    collected: dict[tuple[int, int], TrialReport] = {}
    n_workers = _worker_count(workers)
    if n_workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            for sweep_index, trial_index, report in pool.map(
                _run_point_trial, tasks, chunksize=max(1, len(tasks) // (n_workers * 8))
            ):
                collected[(sweep_index, trial_index)] = report
    else:
        for task in tasks:
            sweep_index, trial_index, report = _run_point_trial(task)
            collected[(sweep_index, trial_index)] = report

    results = []
    for sweep_index, value in enumerate(points):
        reports = tuple(
            collected[(sweep_index, trial_index)] for trial_index in range(config.trials)
        )
        results.append(
            PointResult(
                axis=config.sweep.axis if config.sweep else None,
                value=value,
                reports=reports,
                aggregate=_aggregate(reports),
            )
        )
    return results


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(points: list[PointResult], handle, include_timings: bool = False) -> None:
    """Fixed-schema CSV: trial rows then one aggregate row keyed "AGG" per point."""
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for point in points:
        axis = point.axis or ""
        value = _fmt(point.value) if point.axis else ""
        for report in point.reports:
            writer.writerow(
                [
                    axis,
                    value,
                    report.trial_index,
                    report.seed,
                    report.comparisons,
                    _fmt(report.pac_correct),
                    _fmt(report.exact_correct),
                    _fmt(report.elapsed) if include_timings else "",
                    "",
                ]
            )
        agg = point.aggregate
        writer.writerow(
            [
                axis,
                value,
                "AGG",
                "",
                _fmt(agg.comparisons_mean),
                _fmt(agg.pac_rate),
                _fmt(agg.exact_rate),
                _fmt(agg.elapsed_mean) if include_timings else "",
                _fmt(agg.comparisons_std),
            ]
        )


def write_csv_path(
    points: list[PointResult], path: str, include_timings: bool = False
) -> None:
    with open(path, "w", newline="") as handle:
        write_csv(points, handle, include_timings=include_timings)
