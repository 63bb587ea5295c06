"""Experiment runner: determinism, CSV schema, aggregation, parallelism."""

import io
import json

import pytest

from pairselect.core import SelectionParams
from pairselect.harness import (
    ConfigError,
    ExperimentConfig,
    SweepSpec,
    _worker_count,
    run_experiment,
    run_trial,
    write_csv,
)
from pairselect.oracle import InstanceSpec

from conftest import DATA_DIR


def equal_gap_config(**overrides):
    base = {
        "instance": {"model": "equal_gap", "n": 8, "p": 0.6, "seed": 0},
        "algorithm": "tks",
        "params": {"k": 2, "epsilon": 0.2, "delta": 0.2},
        "trials": 3,
        "master_seed": 12345,
    }
    base.update(overrides)
    return ExperimentConfig.from_dict(base)


def csv_bytes(points, include_timings=False) -> bytes:
    buffer = io.StringIO()
    write_csv(points, buffer, include_timings=include_timings)
    return buffer.getvalue().encode()


class TestConfig:
    def test_round_trip(self):
        config = equal_gap_config(
            sweep={"axis": "n", "values": [8, 12]},
        )
        assert ExperimentConfig.from_dict(config.to_dict()) == config

    def test_missing_field_path(self):
        with pytest.raises(ConfigError, match="params: required"):
            ExperimentConfig.from_dict({"instance": {}, "algorithm": "tks",
                                        "trials": 1, "master_seed": 0})

    def test_unknown_field_rejected(self):
        with pytest.raises(ConfigError, match="unknown"):
            cfg = equal_gap_config().to_dict()
            cfg["bogus"] = 1
            ExperimentConfig.from_dict(cfg)

    def test_bad_instance_field_path(self):
        with pytest.raises(ConfigError, match="instance.p"):
            equal_gap_config(instance={"model": "equal_gap", "n": 8, "seed": 0})

    def test_epsilon_required_for_pac_algorithms(self):
        with pytest.raises(ConfigError, match="params.epsilon"):
            equal_gap_config(params={"k": 2, "delta": 0.2})

    def test_k_over_half_rejected(self):
        with pytest.raises(ConfigError, match="n/2"):
            equal_gap_config(params={"k": 5, "epsilon": 0.2, "delta": 0.2})

    def test_seebs_needs_k1(self):
        with pytest.raises(ConfigError, match="seebs"):
            equal_gap_config(algorithm="seebs",
                             params={"k": 2, "epsilon": 0.2, "delta": 0.2})

    def test_sweep_values_validated(self):
        with pytest.raises(ConfigError, match="n/2"):
            equal_gap_config(sweep={"axis": "k", "values": [1, 6]})

    def test_bad_axis(self):
        with pytest.raises(ConfigError, match="sweep.axis"):
            SweepSpec(axis="m", values=(1,))


class TestRunTrial:
    def test_noiseless_instance_always_exact(self):
        config = equal_gap_config(
            instance={"model": "equal_gap", "n": 4, "p": 1.0, "seed": 0},
            params={"k": 1, "epsilon": 0.3, "delta": 0.2},
        )
        for trial in range(5):
            report = run_trial(config, 0, trial)
            assert report.exact_correct and report.pac_correct
            assert report.returned == (0,)

    def test_seed_column_is_stable_hash(self):
        config = equal_gap_config()
        a = run_trial(config, 0, 1)
        b = run_trial(config, 0, 1)
        assert a.seed == b.seed
        assert a.comparisons == b.comparisons
        assert run_trial(config, 0, 2).seed != a.seed

    def test_empirical_instance_scored_by_borda(self):
        config = ExperimentConfig.from_dict(
            {
                "instance": {
                    "model": "empirical",
                    "source": str(DATA_DIR / "irish_election.pwg"),
                    "missing": "half",
                    "seed": 0,
                },
                "algorithm": "eqs",
                "params": {"k": 2, "epsilon": 0.05, "delta": 0.1},
                "trials": 1,
                "master_seed": 7,
            }
        )
        report = run_trial(config, 0, 0)
        assert report.comparisons > 0


class TestRunExperiment:
    def test_zero_trials_empty_aggregate(self):
        points = run_experiment(equal_gap_config(trials=0), workers=1)
        assert points[0].reports == ()
        agg = points[0].aggregate
        assert agg.trials == 0 and agg.comparisons_mean is None

    def test_aggregate_matches_recomputation(self):
        points = run_experiment(equal_gap_config(trials=4), workers=1)
        reports = points[0].reports
        agg = points[0].aggregate
        comps = [r.comparisons for r in reports]
        assert agg.comparisons_mean == sum(comps) / len(comps)
        assert agg.pac_rate == sum(r.pac_correct for r in reports) / len(reports)
        assert agg.exact_rate == sum(r.exact_correct for r in reports) / len(reports)

    def test_sweep_rows_ordered(self):
        config = equal_gap_config(trials=2, sweep={"axis": "n", "values": [8, 12]})
        points = run_experiment(config, workers=1)
        assert [p.value for p in points] == [8, 12]
        for point in points:
            assert [r.trial_index for r in point.reports] == [0, 1]

    def test_parallel_matches_serial_bytes(self):
        config = equal_gap_config(trials=4, sweep={"axis": "k", "values": [1, 2]})
        serial = csv_bytes(run_experiment(config, workers=1))
        parallel = csv_bytes(run_experiment(config, workers=3))
        assert serial == parallel

    def test_rerun_byte_identical(self):
        config = equal_gap_config(trials=3)
        assert csv_bytes(run_experiment(config, workers=2)) == csv_bytes(
            run_experiment(config, workers=2)
        )

    def test_timings_column_only_on_request(self):
        points = run_experiment(equal_gap_config(trials=1), workers=1)
        bare = csv_bytes(points).decode().splitlines()
        timed = csv_bytes(points, include_timings=True).decode().splitlines()
        assert bare[1].split(",")[7] == ""
        assert float(timed[1].split(",")[7]) > 0


class TestCsvSchema:
    def test_header_and_agg_row(self):
        points = run_experiment(equal_gap_config(trials=2), workers=1)
        lines = csv_bytes(points).decode().splitlines()
        assert lines[0] == (
            "sweep_axis,sweep_value,trial,seed,comparisons,"
            "pac_correct,exact_correct,elapsed,comparisons_std"
        )
        assert len(lines) == 1 + 2 + 1
        assert lines[-1].split(",")[2] == "AGG"

    def test_golden_file(self):
        golden = (DATA_DIR / "golden_run.csv").read_bytes()
        config = ExperimentConfig.from_dict(
            json.loads((DATA_DIR / "golden_run.json").read_text())
        )
        assert csv_bytes(run_experiment(config, workers=2)) == golden

    def test_correctness_rates_recomputable_from_rows(self):
        points = run_experiment(equal_gap_config(trials=5), workers=1)
        lines = csv_bytes(points).decode().splitlines()
        trial_rows = [l.split(",") for l in lines[1:-1]]
        agg = lines[-1].split(",")
        pac = sum(int(row[5]) for row in trial_rows) / len(trial_rows)
        assert float(agg[5]) == pac


class TestWorkerCount:
    def test_explicit_wins(self):
        assert _worker_count(5) == 5

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("RANK_THREADS", "3")
        assert _worker_count(None) == 3

    def test_default_positive(self, monkeypatch):
        monkeypatch.delenv("RANK_THREADS", raising=False)
        assert _worker_count(None) >= 1
