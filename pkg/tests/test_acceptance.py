"""Acceptance criteria, one test per criterion, each printing a pass/fail line.

Run with:  pytest tests/test_acceptance.py -v -s
"""

import io
import itertools
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from pairselect.bounds import BoundQuery, exact_lower_bound, growth_table
from pairselect.core import true_best_k
from pairselect.harness import ExperimentConfig, run_experiment, write_csv
from pairselect.ingest import borda_ranking, parse_pwg, to_preference_instance
from pairselect.oracle import (
    MatrixOracle,
    duel_bernoulli_p1,
    make_empirical,
    mnl_matrix,
)
from pairselect.selection import Buckets, DiParams, distribute_item
from pairselect.verify import best_k_bruteforce, is_eps_k_optimal, validate_sst, validate_sti

from conftest import DATA_DIR


@contextmanager
def criterion(name):
    try:
        yield
    except Exception:
        print(f"[FAIL] {name}")
        raise
    print(f"[PASS] {name}")


def failure_margin(delta, trials):
    return delta + 3 * math.sqrt(delta * (1 - delta) / trials)


def test_confidence_guarantees_equal_gap():
    """Every algorithm keeps its failure rate within the configured confidence
    on the constant-gap instance (n=20, eps=0.08, delta=0.1, 400 trials)."""
    trials, delta, epsilon, n = 400, 0.1, 0.08, 20
    jobs = [
        ("eqs", 1), ("eqs", 4),
        ("tks", 1), ("tks", 4),
        ("seebs", 1),
        ("seeks", 1), ("seeks", 4),
        ("seeks_v2", 1), ("seeks_v2", 4),
    ]
    threshold = failure_margin(delta, trials)
    started = time.perf_counter()
    with criterion(
        f"confidence guarantees: 9 configs x {trials} trials, failure <= {threshold:.3f}"
    ):
        for algorithm, k in jobs:
            params = {"k": k, "delta": delta}
            if algorithm in ("eqs", "tks"):
                params["epsilon"] = epsilon
            config = ExperimentConfig.from_dict(
                {
                    "instance": {"model": "equal_gap", "n": n, "p": 0.6, "seed": 0},
                    "algorithm": algorithm,
                    "params": params,
                    "trials": trials,
                    "master_seed": 808 + k,
                }
            )
            (point,) = run_experiment(config)
            agg = point.aggregate
            rate = agg.pac_rate if algorithm in ("eqs", "tks") else agg.exact_rate
            failure = 1.0 - rate
            print(f"    {algorithm} k={k}: failure {failure:.4f}, "
                  f"mean comparisons {agg.comparisons_mean:.0f}")
            assert failure <= threshold, (algorithm, k, failure)
        elapsed = time.perf_counter() - started
        print(f"    total runtime {elapsed:.1f}s")
        assert elapsed < 300.0


def test_distribute_item_five_event_contract():
    """Each win probability lands in its designated event with frequency at
    least 1 - delta - margin over 1,000 trials (eps=0.1, shifts 0.03)."""
    delta, trials = 0.1, 1000
    params = DiParams(epsilon=0.1, shift_up=0.03, shift_down=0.03, delta=delta)
    cases = [
        (0.80, lambda b: b == "up", "lands up"),          # p >= 0.63
        (0.55, lambda b: b != "down", "stays out of down"),  # p in (0.53, 0.63)
        (0.50, lambda b: b == "mid", "lands mid"),        # p in [0.47, 0.53]
        (0.45, lambda b: b != "up", "stays out of up"),   # p in (0.37, 0.47)
        (0.20, lambda b: b == "down", "lands down"),      # p <= 0.37
    ]
    floor = 1 - delta - 3 * math.sqrt(delta * (1 - delta) / trials)
    with criterion(f"distribute-item five-event contract: rate >= {floor:.4f}"):
        from pairselect.core import PreferenceInstance

        for p, good, label in cases:
            instance = PreferenceInstance([[0.5, p], [1.0 - p, 0.5]])
            hits = 0
            for trial in range(trials):
                seed = np.random.SeedSequence(entropy=(4242, int(p * 100), trial))
                oracle = MatrixOracle(instance, np.random.default_rng(seed))
                hits += good(distribute_item(oracle, 0, 1, params, Buckets()))
            rate = hits / trials
            print(f"    p={p:.2f} {label}: {rate:.3f}")
            assert rate >= floor, (p, rate)


def test_bruteforce_equivalence_on_random_instances():
    """On 200 random score-model instances (n <= 8) the ranking path, the
    subset brute force, and the spelled-out optimality definition agree."""
    rng = np.random.default_rng(321)
    with criterion("brute-force equivalence on 200 random instances (n <= 8)"):
        for _ in range(200):
            n = int(rng.integers(2, 9))
            k = int(rng.integers(1, n + 1))
            instance = mnl_matrix(rng.uniform(0.2, 3.0, size=n))
            assert true_best_k(instance, k) == best_k_bruteforce(instance, k)
            epsilon = float(rng.uniform(0.0, 0.25))
            for combo in itertools.combinations(range(n), k):
                inside = set(combo)
                naive = all(
                    instance.p[i, j] >= 0.5 - epsilon
                    for i in inside
                    for j in range(n)
                    if j not in inside
                )
                assert is_eps_k_optimal(instance, combo, epsilon).passed == naive


def test_reduction_duel_probabilities():
    """Bernoulli-arm duels: win odds mu_i : mu_j and geometric pull counts."""
    with criterion("reduction duel: P(first arm) = 2/3 +- 0.01; mean pulls 4.0 +- 0.1"):
        rng = np.random.default_rng(1905)
        runs = 20_000
        wins = pulls_sum = 0
        for _ in range(runs):
            winner, _ = duel_bernoulli_p1(0.6, 0.3, rng)
            wins += winner == 0
        freq = wins / runs
        print(f"    first-arm frequency {freq:.4f}")
        assert abs(freq - 2.0 / 3.0) <= 0.01
        for _ in range(runs):
            _, pulls = duel_bernoulli_p1(0.25, 0.25, rng)
            pulls_sum += pulls
        mean_pulls = pulls_sum / runs
        print(f"    mean pulls {mean_pulls:.3f}")
        assert abs(mean_pulls - 4.0) <= 0.1


def test_quickselect_tournament_crossover():
    """At n=120, eps=0.08, delta=0.01 (100 trials): the tournament wins at
    k=1 and quickselect wins at k=8."""
    means = {}
    with criterion("crossover: tks < eqs at k=1 and eqs < tks at k=8 (n=120)"):
        for algorithm in ("eqs", "tks"):
            for k in (1, 8):
                config = ExperimentConfig.from_dict(
                    {
                        "instance": {"model": "equal_gap", "n": 120, "p": 0.6, "seed": 0},
                        "algorithm": algorithm,
                        "params": {"k": k, "epsilon": 0.08, "delta": 0.01},
                        "trials": 100,
                        "master_seed": 1905,
                    }
                )
                (point,) = run_experiment(config)
                means[(algorithm, k)] = point.aggregate.comparisons_mean
        for k in (1, 8):
            print(f"    k={k}: eqs {means[('eqs', k)]:.0f}, tks {means[('tks', k)]:.0f}")
        assert means[("tks", 1)] < means[("eqs", 1)]
        assert means[("eqs", 8)] < means[("tks", 8)]


def test_election_data_pipeline():
    """The bundled 12-candidate election fixture: parses, fails both
    transitivity validators, and the exact selector recovers the Borda top-4
    in at least 99 of 100 trials at delta=0.01."""
    from pairselect.selection import elimination_k_select

    with criterion("election data: n=12, non-SST/STI, Borda top-4 >= 99/100"):
        doc = parse_pwg((DATA_DIR / "irish_election.pwg").read_text())
        assert doc.n == 12
        instance = to_preference_instance(doc, missing_policy="error")
        assert not validate_sst(instance).passed
        assert not validate_sti(instance).passed
        truth = borda_ranking(instance)[0].top(4)
        correct = 0
        for trial in range(100):
            root = np.random.SeedSequence(entropy=(52, 0, trial))
            oracle_ss, algo_ss = root.spawn(2)
            oracle = MatrixOracle(instance, np.random.default_rng(oracle_ss))
            result = elimination_k_select(
                oracle, range(12), 4, 0.01, np.random.default_rng(algo_ss)
            )
            correct += result.selected == truth
        print(f"    correct trials: {correct}/100")
        assert correct >= 99


def test_bound_growth_and_spot_value():
    """The general-k ceiling dominates the k=1 ceiling and the floor at every
    grid point; the floor's spot value matches to 0.5."""
    with criterion("bounds: upper_kgt1 dominates on 10..1000 grid; spot 4606.0 +- 0.5"):
        grid = sorted({int(round(10 ** (1 + 2 * i / 24))) for i in range(25)})
        assert grid[0] == 10 and grid[-1] == 1000
        rows = growth_table(0.1, 0.01, 1, grid)
        for row in rows:
            assert row.upper_kgt1 > row.upper_k1 > 0
            assert row.upper_kgt1 > row.lower > 0
        spot = exact_lower_bound(BoundQuery.uniform(n=10, k=1, delta=0.01, gap=0.1))
        print(f"    spot value {spot:.3f}")
        assert abs(spot - 4606.0) <= 0.5


def test_byte_identical_reruns():
    """Identical config and master seed give byte-identical CSV under any
    worker count."""
    with criterion("determinism: byte-identical CSV across reruns and worker counts"):
        config = ExperimentConfig.from_dict(
            {
                "instance": {"model": "uniform_gap", "n": 10, "lo": 0.05, "hi": 0.15, "seed": 3},
                "algorithm": "tks",
                "params": {"k": 2, "epsilon": 0.15, "delta": 0.1},
                "trials": 6,
                "master_seed": 2**63 + 11,
                "sweep": {"axis": "k", "values": [1, 2]},
            }
        )
        outputs = []
        for workers in (1, 2, 3, 1):
            buffer = io.StringIO()
            write_csv(run_experiment(config, workers=workers), buffer)
            outputs.append(buffer.getvalue().encode())
        assert all(out == outputs[0] for out in outputs)
        assert outputs[0].count(b"AGG") == 2
