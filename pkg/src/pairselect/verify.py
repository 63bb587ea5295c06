"""Ground-truth checkers: optimality verdicts, transitivity validators, brute force.

These functions read exact preference matrices (never samples) and return
``Verdict`` objects whose witnesses can be re-checked directly against the
matrix. Validators run over all item triples; they are O(n^3) work arranged
as O(n) vectorized passes, gated by a size cap with an optional sampling
fallback for larger instances.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core import (
    KOutOfRangeError,
    NotStrictOrderError,
    PairSelectError,
    PreferenceInstance,
    Ranking,
    ranking_of,
    true_best_k,
)

STI_TOL = 1e-12
VALIDATOR_SIZE_CAP = 2048
BRUTE_FORCE_CAP = 12


class WrongSizeError(PairSelectError, ValueError):
    """Candidate set has the wrong cardinality or invalid members."""


class TooLargeError(PairSelectError, ValueError):
    """Instance exceeds the combinatorial guard of an exhaustive check."""


@dataclass(frozen=True)
class Verdict:
    """Pass/fail with a violating witness present exactly when failing."""

    passed: bool
    witness: dict | None = None

    def __bool__(self) -> bool:
        return self.passed


@dataclass(frozen=True)
class GammaVerdict(Verdict):
    """Verdict of the relaxed transitivity conditions, with the minimal feasible factor."""

    minimal_gamma: float = float("inf")


def _check_subset(instance: PreferenceInstance, items) -> frozenset[int]:
    chosen = frozenset(int(i) for i in items)
    if len(chosen) != len(list(items)):
        raise WrongSizeError("candidate set contains duplicate items")
    if not chosen:
        raise WrongSizeError("candidate set is empty")
    if not all(0 <= i < instance.n for i in chosen):
        raise WrongSizeError(f"candidate set has items outside [0, {instance.n})")
    return chosen


def is_eps_k_optimal(instance: PreferenceInstance, items, epsilon: float) -> Verdict:
    """Pass iff every chosen item beats every unchosen one with probability >= 1/2 - epsilon.

    The witness is the cross pair minimizing ``p[i, j]``.
    """
    if epsilon < 0.0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    chosen = _check_subset(instance, items)
    inside = sorted(chosen)
    outside = sorted(set(range(instance.n)) - chosen)
    if not outside:
        return Verdict(True)
    sub = instance.p[np.ix_(inside, outside)]
    flat = int(sub.argmin())
    a, b = divmod(flat, len(outside))
    i, j, p_min = inside[a], outside[b], float(sub.min())
    if p_min >= 0.5 - epsilon:
        return Verdict(True)
    return Verdict(False, {"pair": (i, j), "p": p_min})


def is_exact_best_k(
    instance: PreferenceInstance, items, k: int, ranking: Ranking | None = None
) -> Verdict:
    """Pass iff the candidate set is exactly the top-k of the true ranking.

    ``ranking`` overrides the tournament-derived order (used for instances
    whose beats-relation is not a total order, scored against an externally
    supplied ground truth such as a Borda ranking).
    """
    chosen = _check_subset(instance, items)
    if len(chosen) != k:
        raise WrongSizeError(f"candidate set has {len(chosen)} items, expected k={k}")
    truth = ranking.top(k) if ranking is not None else true_best_k(instance, k)
    if chosen == truth:
        return Verdict(True)
    return Verdict(
        False,
        {"missing": tuple(sorted(truth - chosen)), "extra": tuple(sorted(chosen - truth))},
    )


def _order_or_witness(instance: PreferenceInstance):
    """Tournament ranking, or a witness dict explaining why none exists."""
    p = instance.p
    n = instance.n
    if not instance.strict_order:
        off = ~np.eye(n, dtype=bool)
        i, j = (int(x) for x in np.argwhere((p == 0.5) & off)[0])
        return None, {"pair": (i, j), "p": 0.5, "reason": "tie"}
    wins = (p > 0.5).sum(axis=1)
    if sorted(wins.tolist()) == list(range(n)):
        order = np.argsort(-wins, kind="stable")
        return Ranking(tuple(int(x) for x in order)), None
    # Any non-transitive tournament contains a directed 3-cycle; locate one.
    order = np.argsort(-wins, kind="stable")
    for a, b, c in itertools.combinations(order.tolist(), 3):
        for i, j, l in ((a, b, c), (a, c, b), (b, a, c)):
            if p[i, j] > 0.5 and p[j, l] > 0.5 and p[l, i] > 0.5:
                return None, {
                    "triple": (int(i), int(j), int(l)),
                    "p_ij": float(p[i, j]),
                    "p_jl": float(p[j, l]),
                    "p_li": float(p[l, i]),
                    "reason": "cycle",
                }
    return None, {"reason": "cycle"}  # pragma: no cover - unreachable


def validate_sst(instance: PreferenceInstance) -> Verdict:
    """Strong stochastic transitivity check.

    Passes iff a strict total order exists and, for every ranked triple
    i > j > l, ``p[i, l] >= max(p[i, j], p[j, l])``. Along the ranked matrix
    this is equivalent to rows being non-decreasing and columns non-increasing
    above the diagonal, so the scan is O(n^2). Cycles and exact-1/2 ties are
    reported as failures with a witness, never raised.
    """
    if instance.n <= 1:
        return Verdict(True)
    ranking, witness = _order_or_witness(instance)
    if ranking is None:
        return Verdict(False, witness)
    order = list(ranking.order)
    q = instance.p[np.ix_(order, order)]
    n = instance.n
    for a in range(n - 2):
        row = q[a, a + 1 :]
        drops = np.nonzero(row[1:] < row[:-1])[0]
        if drops.size:
            b = a + 1 + int(drops[0])  # positions (a, b, b+1)
            i, j, l = order[a], order[b], order[b + 1]
            return Verdict(
                False,
                {
                    "triple": (i, j, l),
                    "p_il": float(instance.p[i, l]),
                    "p_ij": float(instance.p[i, j]),
                    "p_jl": float(instance.p[j, l]),
                },
            )
    for c in range(2, n):
        col = q[:c, c]
        rises = np.nonzero(col[1:] > col[:-1])[0]
        if rises.size:
            a = int(rises[0])  # positions (a, a+1, c)
            i, j, l = order[a], order[a + 1], order[c]
            return Verdict(
                False,
                {
                    "triple": (i, j, l),
                    "p_il": float(instance.p[i, l]),
                    "p_ij": float(instance.p[i, j]),
                    "p_jl": float(instance.p[j, l]),
                },
            )
    return Verdict(True)


def _triple_guard(n: int, sample: int | None) -> None:
    if n > VALIDATOR_SIZE_CAP and sample is None:
        raise TooLargeError(
            f"n={n} exceeds the all-triples cap ({VALIDATOR_SIZE_CAP}); "
            "pass sample=<count> to check a random subset of triples"
        )


def validate_sti(instance: PreferenceInstance, sample: int | None = None) -> Verdict:
    """Triangle inequality on pair gaps: ``|p[i,l]-1/2| <= |p[i,j]-1/2| + |p[j,l]-1/2|``.

    Checks all ordered triples (worst violation reported); violations smaller
    than ``STI_TOL`` are treated as floating-point noise.
    """
    n = instance.n
    if n <= 2:
        return Verdict(True)
    _triple_guard(n, sample)
    d = np.abs(instance.p - 0.5)
    worst = STI_TOL
    worst_triple = None
    if sample is not None and n > VALIDATOR_SIZE_CAP:
        rng = np.random.default_rng(0)
        triples = rng.integers(0, n, size=(sample, 3))
        for i, j, l in triples:
            excess = d[i, l] - d[i, j] - d[j, l]
            if excess > worst:
                worst = excess
                worst_triple = (int(i), int(j), int(l))
    else:
        for j in range(n):
            bound = d[:, j, None] + d[None, j, :]
            excess = d - bound
            flat = int(excess.argmax())
            i, l = divmod(flat, n)
            if excess[i, l] > worst:
                worst = float(excess[i, l])
                worst_triple = (int(i), j, int(l))
    if worst_triple is None:
        return Verdict(True)
    i, j, l = worst_triple
    return Verdict(
        False,
        {
            "triple": (i, j, l),
            "gap_il": float(d[i, l]),
            "gap_ij": float(d[i, j]),
            "gap_jl": float(d[j, l]),
            "excess": float(worst),
        },
    )


def validate_gamma(
    instance: PreferenceInstance,
    gamma: float,
    ranking: Ranking | None = None,
    sample: int | None = None,
) -> GammaVerdict:
    """Relaxed transitivity at factor gamma >= 1 over ranked triples i > j > l.

    Requires ``p[i, l] >= max(p[i, j], p[j, l]) / gamma`` and
    ``gap(i, l) <= gamma * (gap(i, j) + gap(j, l))`` for every ranked triple,
    and reports the minimal feasible factor (6 significant digits). The order
    defaults to the tournament ranking; pass ``ranking`` explicitly (e.g. a
    Borda ranking) for instances without a strict order.
    """
    if gamma < 1.0:
        raise ValueError(f"gamma must be >= 1, got {gamma}")
    if ranking is None:
        ranking = ranking_of(instance)  # may raise NotStrictOrderError / cycle
    n = instance.n
    if n <= 2:
        return GammaVerdict(True, None, 1.0)
    _triple_guard(n, sample)
    order = list(ranking.order)
    q = instance.p[np.ix_(order, order)]
    dq = np.abs(q - 0.5)
    minimal = 1.0
    worst = None  # (ratio, kind, a, b, c) in ranked positions
    with np.errstate(divide="ignore", invalid="ignore"):
        for b in range(1, n - 1):
            above = np.arange(b)
            below = np.arange(b + 1, n)
            q_ac = q[np.ix_(above, below)]
            num1 = np.maximum(q[above, b, None], q[None, b, below])
            ratio1 = np.where(num1 > 0, num1 / q_ac, 1.0)
            gap_sum = dq[above, b, None] + dq[None, b, below]
            d_ac = dq[np.ix_(above, below)]
            ratio2 = np.where(
                gap_sum > 0, d_ac / gap_sum, np.where(d_ac > 0, np.inf, 1.0)
            )
            for kind, ratios in (("probability", ratio1), ("gap", ratio2)):
                flat = int(ratios.argmax())
                a, c = divmod(flat, below.size)
                r = float(ratios[a, c])
                if r > minimal:
                    minimal = r
                    worst = (kind, int(above[a]), b, int(below[c]))
    minimal = float(f"{minimal:.6g}")
    passed = minimal <= gamma
    if passed:
        return GammaVerdict(True, None, minimal)
    kind, a, b, c = worst
    i, j, l = order[a], order[b], order[c]
    return GammaVerdict(
        False,
        {
            "triple": (i, j, l),
            "condition": kind,
            "required_gamma": minimal,
            "p_il": float(instance.p[i, l]),
            "p_ij": float(instance.p[i, j]),
            "p_jl": float(instance.p[j, l]),
        },
        minimal,
    )


def best_k_bruteforce(instance: PreferenceInstance, k: int) -> frozenset[int]:
    """Exhaustive best-k: the subset maximizing the minimum cross-pair win probability.

    Independent of the ranking machinery; restricted to n <= 12. Ties between
    subsets resolve to the lexicographically first combination.
    """
    n = instance.n
    if n > BRUTE_FORCE_CAP:
        raise TooLargeError(f"brute force is capped at n={BRUTE_FORCE_CAP}, got n={n}")
    if not 1 <= k <= n:
        raise KOutOfRangeError(f"k must lie in [1, {n}], got {k}")
    if k == n:
        return frozenset(range(n))
    p = instance.p
    everyone = set(range(n))
    best_subset = None
    best_score = -1.0
    for combo in itertools.combinations(range(n), k):
        outside = sorted(everyone - set(combo))
        score = float(p[np.ix_(combo, outside)].min())
        if score > best_score:
            best_score = score
            best_subset = combo
    return frozenset(best_subset)
