"""Verdicts, transitivity validators, and the brute-force reference."""

import itertools
import math

import numpy as np
import pytest

from pairselect.core import (
    NotStrictOrderError,
    PreferenceInstance,
    gap_vector,
    ranking_of,
    true_best_k,
)
from pairselect.ingest import load_instance_file
from pairselect.oracle import equal_gap_matrix, thurstone_matrix
from pairselect.verify import (
    TooLargeError,
    WrongSizeError,
    best_k_bruteforce,
    is_eps_k_optimal,
    is_exact_best_k,
    validate_gamma,
    validate_sst,
    validate_sti,
)

from conftest import random_mnl_instance


def naive_eps_k_optimal(instance, subset, epsilon):
    """Definition spelled out as a double loop, independently of the library."""
    inside = set(subset)
    for i in inside:
        for j in range(instance.n):
            if j not in inside and instance.p[i, j] < 0.5 - epsilon:
                return False
    return True


def naive_sst(instance):
    try:
        order = ranking_of(instance).order
    except Exception:
        return False
    for a, b, c in itertools.combinations(range(len(order)), 3):
        i, j, l = order[a], order[b], order[c]
        if instance.p[i, l] < max(instance.p[i, j], instance.p[j, l]):
            return False
    return True


def naive_sti(instance):
    d = np.abs(instance.p - 0.5)
    n = instance.n
    for i in range(n):
        for j in range(n):
            for l in range(n):
                if d[i, l] > d[i, j] + d[j, l] + 1e-12:
                    return False
    return True


class TestEpsKOptimal:
    def test_true_top_k_passes_any_epsilon(self):
        inst = equal_gap_matrix(6, 0.6)
        for eps in (0.0, 0.05, 0.3):
            assert is_eps_k_optimal(inst, {0, 1}, eps).passed

    def test_worst_item_fails_with_witness(self):
        inst = equal_gap_matrix(6, 0.6)
        verdict = is_eps_k_optimal(inst, {0, 5}, 0.05)
        assert not verdict.passed
        assert verdict.witness["p"] == pytest.approx(0.4)
        i, j = verdict.witness["pair"]
        assert inst.p[i, j] == pytest.approx(verdict.witness["p"])

    def test_agreement_with_naive_enumeration(self, rng):
        for _ in range(20):
            n = int(rng.integers(3, 9))
            inst = random_mnl_instance(rng, n)
            k = int(rng.integers(1, n))
            eps = float(rng.uniform(0.0, 0.2))
            for combo in itertools.combinations(range(n), k):
                assert (
                    is_eps_k_optimal(inst, combo, eps).passed
                    == naive_eps_k_optimal(inst, combo, eps)
                )

    def test_half_epsilon_accepts_everything(self, rng):
        inst = random_mnl_instance(rng, 6)
        for combo in itertools.combinations(range(6), 3):
            assert is_eps_k_optimal(inst, combo, 0.5).passed

    def test_rejects_bad_subsets(self):
        inst = equal_gap_matrix(4, 0.6)
        with pytest.raises(WrongSizeError):
            is_eps_k_optimal(inst, [], 0.1)
        with pytest.raises(WrongSizeError):
            is_eps_k_optimal(inst, [0, 7], 0.1)


class TestExactBestK:
    def test_true_set_passes(self):
        inst = equal_gap_matrix(5, 0.7)
        assert is_exact_best_k(inst, {0, 1}, 2).passed

    def test_boundary_swap_fails(self):
        inst = equal_gap_matrix(5, 0.7)
        verdict = is_exact_best_k(inst, {0, 2}, 2)
        assert not verdict.passed
        assert verdict.witness == {"missing": (1,), "extra": (2,)}

    def test_wrong_size_raises(self):
        with pytest.raises(WrongSizeError):
            is_exact_best_k(equal_gap_matrix(4, 0.6), {0}, 2)

    def test_small_epsilon_forces_exactness(self, rng):
        # With tolerance below every outside-item boundary gap, approximate
        # optimality pins down exactly the true top-k set (checked by
        # enumerating every k-subset).
        for _ in range(10):
            n = int(rng.integers(3, 9))
            inst = random_mnl_instance(rng, n)
            k = int(rng.integers(1, n))
            if k == n:
                continue
            gaps = gap_vector(inst, k)
            order = ranking_of(inst).order
            outside_gaps = [gaps.delta_item[i] for i in order[k:]]
            eps = 0.9 * min(outside_gaps)
            if eps <= 0:
                continue
            for combo in itertools.combinations(range(n), k):
                if is_eps_k_optimal(inst, combo, eps).passed:
                    assert is_exact_best_k(inst, combo, k).passed

    def test_exact_implies_eps_optimal(self, rng):
        inst = random_mnl_instance(rng, 7)
        top = true_best_k(inst, 3)
        for eps in (0.0, 0.01, 0.2):
            assert is_eps_k_optimal(inst, top, eps).passed


class TestValidateSst:
    def test_equal_gap_passes(self):
        assert validate_sst(equal_gap_matrix(5, 0.6)).passed

    def test_singleton_passes(self):
        assert validate_sst(PreferenceInstance([[0.5]])).passed

    def test_violating_triple_reported(self):
        p = np.full((3, 3), 0.5)
        p[0, 1], p[1, 0] = 0.6, 0.4
        p[1, 2], p[2, 1] = 0.6, 0.4
        p[0, 2], p[2, 0] = 0.55, 0.45  # weaker than both links
        verdict = validate_sst(PreferenceInstance(p))
        assert not verdict.passed
        assert verdict.witness["triple"] == (0, 1, 2)
        assert verdict.witness["p_il"] == pytest.approx(0.55)

    def test_cycle_fails_with_witness(self):
        p = np.full((3, 3), 0.5)
        for i, j in ((0, 1), (1, 2), (2, 0)):
            p[i, j], p[j, i] = 0.7, 0.3
        verdict = validate_sst(PreferenceInstance(p))
        assert not verdict.passed
        assert verdict.witness["reason"] == "cycle"

    def test_tie_fails_with_witness(self):
        p = np.full((3, 3), 0.5)
        p[0, 2], p[2, 0] = 0.7, 0.3
        p[1, 2], p[2, 1] = 0.6, 0.4
        verdict = validate_sst(PreferenceInstance(p))
        assert not verdict.passed
        assert verdict.witness["reason"] == "tie"

    def test_agreement_with_naive_triple_loop(self, rng):
        for _ in range(30):
            n = int(rng.integers(3, 8))
            if rng.random() < 0.5:
                inst = random_mnl_instance(rng, n)
            else:  # random antisymmetric noise, usually invalid
                raw = rng.uniform(0.05, 0.95, size=(n, n))
                p = np.triu(raw, 1)
                p = p + np.tril(1 - p.T, -1)
                np.fill_diagonal(p, 0.5)
                inst = PreferenceInstance(p)
            assert validate_sst(inst).passed == naive_sst(inst)


class TestValidateSti:
    def test_equal_gap_passes(self):
        assert validate_sti(equal_gap_matrix(4, 0.6)).passed

    def test_thurstone_passes(self, rng):
        inst = thurstone_matrix(rng.uniform(0, 1, 6), 1.0)
        assert validate_sti(inst).passed

    def test_violation_reported_with_values(self):
        p = np.full((3, 3), 0.5)
        p[0, 1], p[1, 0] = 0.6, 0.4
        p[1, 2], p[2, 1] = 0.6, 0.4
        p[0, 2], p[2, 0] = 0.95, 0.05  # gap 0.45 > 0.1 + 0.1
        verdict = validate_sti(PreferenceInstance(p))
        assert not verdict.passed
        w = verdict.witness
        assert w["gap_il"] == pytest.approx(0.45)
        i, j, l = w["triple"]
        assert abs(p[i, l] - 0.5) == pytest.approx(w["gap_il"])
        assert w["excess"] == pytest.approx(0.25)

    def test_agreement_with_naive_triple_loop(self, rng):
        for _ in range(20):
            n = int(rng.integers(3, 8))
            raw = rng.uniform(0.05, 0.95, size=(n, n))
            p = np.triu(raw, 1)
            p = p + np.tril(1 - p.T, -1)
            np.fill_diagonal(p, 0.5)
            inst = PreferenceInstance(p)
            assert validate_sti(inst).passed == naive_sti(inst)


class TestValidateGamma:
    def test_factor_one_on_transitive_instance(self, rng):
        inst = random_mnl_instance(rng, 6)
        assert validate_sst(inst).passed and validate_sti(inst).passed
        verdict = validate_gamma(inst, 1.0)
        assert verdict.passed
        assert verdict.minimal_gamma == pytest.approx(1.0)

    def test_irish_fixture_within_five(self, irish_path):
        inst = load_instance_file(str(irish_path))
        verdict = validate_gamma(inst, 5.0)
        assert verdict.passed
        assert 1.0 < verdict.minimal_gamma < 5.0

    def test_everything_passes_at_thousand(self, rng, irish_path):
        for inst in (
            load_instance_file(str(irish_path)),
            random_mnl_instance(rng, 7),
            equal_gap_matrix(5, 0.9),
        ):
            assert validate_gamma(inst, 1000.0).passed

    def test_failure_carries_minimal_factor(self, irish_path):
        inst = load_instance_file(str(irish_path))
        verdict = validate_gamma(inst, 1.5)
        assert not verdict.passed
        assert verdict.minimal_gamma > 1.5
        assert verdict.witness["required_gamma"] == verdict.minimal_gamma

    def test_needs_order(self):
        p = np.full((3, 3), 0.5)
        for i, j in ((0, 1), (1, 2), (2, 0)):
            p[i, j], p[j, i] = 0.7, 0.3
        from pairselect.core import CyclicPreferenceError

        with pytest.raises(CyclicPreferenceError):
            validate_gamma(PreferenceInstance(p), 2.0)


class TestBruteForce:
    def test_equal_gap(self):
        assert best_k_bruteforce(equal_gap_matrix(6, 0.6), 2) == {0, 1}

    def test_subset_count_is_binomial(self):
        assert math.comb(4, 2) == 6
        assert best_k_bruteforce(equal_gap_matrix(4, 0.6), 2) == {0, 1}

    def test_agreement_with_ranking_path(self, rng):
        for _ in range(100):
            n = int(rng.integers(2, 9))
            k = int(rng.integers(1, n + 1))
            inst = random_mnl_instance(rng, n)
            assert best_k_bruteforce(inst, k) == true_best_k(inst, k)

    def test_size_guard(self):
        with pytest.raises(TooLargeError):
            best_k_bruteforce(equal_gap_matrix(13, 0.6), 2)


class TestVerdictContract:
    def test_witness_iff_failed(self, rng, irish_path):
        inst = load_instance_file(str(irish_path))
        for verdict in (
            validate_sst(inst),
            validate_sti(inst),
            validate_gamma(inst, 5.0),
            is_eps_k_optimal(inst, {0, 1}, 0.5),
        ):
            assert verdict.passed == (verdict.witness is None)

    def test_transitive_implies_gamma_one(self, rng):
        for _ in range(5):
            inst = random_mnl_instance(rng, 5)
            if validate_sst(inst).passed and validate_sti(inst).passed:
                assert validate_gamma(inst, 1.0).passed

    def test_sst_witness_reproduces_matrix_values(self, irish_path):
        inst = load_instance_file(str(irish_path))
        w = validate_sst(inst).witness
        i, j, l = w["triple"]
        assert inst.p[i, l] == w["p_il"]
        assert inst.p[i, j] == w["p_ij"]
        assert inst.p[j, l] == w["p_jl"]
        assert w["p_il"] < max(w["p_ij"], w["p_jl"])

    def test_sti_witness_reproduces_matrix_values(self, irish_path):
        inst = load_instance_file(str(irish_path))
        w = validate_sti(inst).witness
        i, j, l = w["triple"]
        d = np.abs(inst.p - 0.5)
        assert d[i, l] == w["gap_il"]
        assert d[i, j] == w["gap_ij"]
        assert d[j, l] == w["gap_jl"]
        assert w["gap_il"] > w["gap_ij"] + w["gap_jl"]
