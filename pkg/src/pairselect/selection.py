"""Adaptive selection algorithms over a comparison oracle.

The building block is ``distribute_item``: it repeatedly compares one item
against a pivot, maintaining an anytime confidence radius around the
empirical win rate, and files the item into an up / mid / down bucket —
early when the radius separates the rate from the decision lines, otherwise
by fixed thresholds after a comparison budget derived from the tolerance.

On top of it:

* ``epsilon_quick_select`` — quickselect with a random pivot; recurses into
  the up or down bucket until k approximately-best items are assembled.
* ``tournament_k_select`` — rounds of quickselect over chunks of size 2k
  with geometrically tightening tolerances, keeping chunk winners until
  exactly k items survive. ``tournament_worst_select`` is the same procedure
  against a winner-flipped oracle.
* ``elimination_best_select`` / ``elimination_k_select`` — exact selection:
  each round picks a pivot via the tournament routines at a halving
  tolerance, then distributes the survivors around it, banking items that
  clear the pivot and discarding items that fall below, until the answer set
  is resolved. ``elimination_k_select`` accepts either tournament or
  quickselect pivot pre-selection (config ids "seeks" / "seeks_v2").

All randomness (pivots, shuffles, tie sampling) comes from the caller's
generator; all comparisons go through the oracle, whose counter delta is
reported in every ``SelectionResult``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    EmptySetError,
    IdenticalItemsError,
    KOutOfRangeError,
    RoundRecord,
    SelectionResult,
)
from .oracle import ComparisonOracle, flipped

UP = "up"
MID = "mid"
DOWN = "down"

_PI2 = math.pi * math.pi
T_MAX_CAP = 2**31


@dataclass(frozen=True)
class DiParams:
    """Tolerance, decision-line shifts, and confidence for one distribute call."""

    epsilon: float
    shift_up: float = 0.0
    shift_down: float = 0.0
    delta: float = 0.1

    def __post_init__(self) -> None:
        if self.epsilon <= 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.shift_up < 0.0 or self.shift_down < 0.0:
            raise ValueError("shifts must be non-negative")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")


@dataclass
class Buckets:
    """Three disjoint piles an item lands in relative to the pivot."""

    up: list[int] = field(default_factory=list)
    mid: list[int] = field(default_factory=list)
    down: list[int] = field(default_factory=list)

    def check_partition(self, expected: int) -> None:
        union = set(self.up) | set(self.mid) | set(self.down)
        total = len(self.up) + len(self.mid) + len(self.down)
        if total != expected or len(union) != expected:
            raise RuntimeError(
                f"buckets do not partition the processed items: sizes "
                f"({len(self.up)}, {len(self.mid)}, {len(self.down)}), expected {expected}"
            )


def max_comparisons(epsilon: float, delta: float) -> int:
    """Comparison budget ``ceil(2/epsilon^2 * ln(4/delta))`` of one distribute call."""
    value = math.ceil(2.0 / (epsilon * epsilon) * math.log(4.0 / delta))
    if value > T_MAX_CAP:
        raise ValueError(
            f"comparison budget {value} exceeds {T_MAX_CAP}; "
            "epsilon is too small for a feasible run"
        )
    return int(value)


def confidence_radius(t: int, delta: float) -> float:
    """Anytime radius ``sqrt(ln(pi^2 t^2 / (3 delta)) / (2t))`` around the win rate."""
    return math.sqrt(math.log(_PI2 * t * t / (3.0 * delta)) / (2.0 * t))


def _distribute_scalar(oracle, item, pivot, params, t_max):
    """Reference per-comparison loop; works with any oracle."""
    log, sqrt = math.log, math.sqrt
    base = log(_PI2 / (3.0 * params.delta))
    up_line = 0.5 + params.shift_up
    down_line = 0.5 - params.shift_down
    compare = oracle.compare
    wins = 0
    for t in range(1, t_max + 1):
        if compare(item, pivot) == item:
            wins += 1
        radius = sqrt((base + 2.0 * log(t)) / (2.0 * t))
        rate = wins / t
        if rate - radius > up_line:
            return UP, t
        if rate + radius < down_line:
            return DOWN, t
    rate = wins / t_max
    half = 0.5 * params.epsilon
    if rate > up_line + half:
        return UP, t_max
    if rate < down_line - half:
        return DOWN, t_max
    return MID, t_max


def _distribute_block(oracle, item, pivot, params, t_max):
    """Vectorized variant with identical decisions; draws outcomes in blocks
    and commits only the consumed prefix to the oracle counter."""
    base = math.log(_PI2 / (3.0 * params.delta))
    up_line = 0.5 + params.shift_up
    down_line = 0.5 - params.shift_down
    wins = 0
    done = 0
    size = 64
    while done < t_max:
        m = min(size, t_max - done)
        block = oracle.outcome_block(item, pivot, m)
        cum = wins + np.cumsum(block)
        t = np.arange(done + 1, done + m + 1, dtype=np.float64)
        radius = np.sqrt((base + 2.0 * np.log(t)) / (2.0 * t))
        rate = cum / t
        up_hit = rate - radius > up_line
        down_hit = rate + radius < down_line
        hit = up_hit | down_hit
        if hit.any():
            idx = int(np.argmax(hit))
            oracle.record_queries(idx + 1)
            return (UP if up_hit[idx] else DOWN), done + idx + 1
        oracle.record_queries(m)
        done += m
        wins = int(cum[-1])
        size = min(size * 2, 4096)
    rate = wins / t_max
    half = 0.5 * params.epsilon
    if rate > up_line + half:
        return UP, t_max
    if rate < down_line - half:
        return DOWN, t_max
    return MID, t_max


def distribute_item(
    oracle: ComparisonOracle,
    item: int,
    pivot: int,
    params: DiParams,
    buckets: Buckets,
) -> str:
    """Compare ``item`` against ``pivot`` until one bucket can be chosen.

    Appends the item to exactly one bucket and returns its name. Uses at most
    ``max_comparisons(params.epsilon, params.delta)`` comparisons.
    """
    if item == pivot:
        raise IdenticalItemsError(f"cannot distribute item {item} against itself")
    t_max = max_comparisons(params.epsilon, params.delta)
    if hasattr(oracle, "outcome_block"):
        bucket, _ = _distribute_block(oracle, item, pivot, params, t_max)
    else:
        bucket, _ = _distribute_scalar(oracle, item, pivot, params, t_max)
    getattr(buckets, bucket).append(item)
    return bucket


def _as_items(items) -> list[int]:
    out = sorted(int(i) for i in items)
    if len(set(out)) != len(out):
        raise ValueError("item collection contains duplicates")
    return out


def _sample(rng: np.random.Generator, pool: list[int], need: int) -> list[int]:
    if need == 0:
        return []
    idx = rng.choice(len(pool), size=need, replace=False)
    return [pool[int(i)] for i in idx]


def chunked(seq: list[int], size: int) -> list[list[int]]:
    """Contiguous chunks of at most ``size`` items; only the last may be smaller."""
    if size < 1:
        raise ValueError("chunk size must be >= 1")
    return [seq[off : off + size] for off in range(0, len(seq), size)]


def _eqs(oracle, items, k, epsilon, delta, rng, trace):
    n = len(items)
    pivot = items[int(rng.integers(n))]
    buckets = Buckets(mid=[pivot])
    child_delta_di = None
    if n > 1:
        child_delta_di = delta / (n * (n - 1))
        params = DiParams(
            epsilon=epsilon / 2.0, shift_up=0.0, shift_down=0.0, delta=child_delta_di
        )
        for item in items:
            if item != pivot:
                distribute_item(oracle, item, pivot, params, buckets)
    buckets.check_partition(n)
    up, mid, down = buckets.up, buckets.mid, buckets.down
    recurse_delta = (n - 1) * delta / n
    if len(up) > k:
        size_after = len(up)
    elif len(up) + len(mid) >= k:
        size_after = k
    else:
        size_after = len(down)
    trace.append(
        RoundRecord(
            index=len(trace) + 1,
            size_before=n,
            size_after=size_after,
            pivot=pivot,
            tolerance=epsilon,
            confidence=delta,
            child_confidence=child_delta_di,
        )
    )
    if len(up) > k:
        return _eqs(oracle, up, k, epsilon, recurse_delta, rng, trace)
    if len(up) + len(mid) >= k:
        return up + _sample(rng, mid, k - len(up))
    rest = _eqs(oracle, down, k - len(up) - len(mid), epsilon, recurse_delta, rng, trace)
    return up + mid + rest


def epsilon_quick_select(
    oracle: ComparisonOracle,
    items,
    k: int,
    epsilon: float,
    delta: float,
    rng: np.random.Generator,
) -> SelectionResult:
    """Quickselect-style approximate k-selection.

    Random pivot; every other item is distributed around it at tolerance
    ``epsilon/2`` with per-item confidence ``delta/(|S|(|S|-1))``; depending
    on the bucket sizes the call finishes from up+mid or recurses into one
    bucket at confidence ``(|S|-1) delta / |S|``.
    """
    pool = _as_items(items)
    if not pool:
        raise EmptySetError("cannot select from an empty set")
    if not 1 <= k <= len(pool):
        raise KOutOfRangeError(f"k must lie in [1, {len(pool)}], got {k}")
    if epsilon <= 0.0 or not 0.0 < delta < 1.0:
        raise ValueError("need epsilon > 0 and delta in (0, 1)")
    start = oracle.count
    trace: list[RoundRecord] = []
    chosen = _eqs(oracle, pool, k, epsilon, delta, rng, trace)
    return SelectionResult(
        selected=frozenset(chosen),
        comparisons=oracle.count - start,
        rounds=len(trace),
        trace=tuple(trace),
    )


def tournament_k_select(
    oracle: ComparisonOracle,
    items,
    k: int,
    epsilon: float,
    delta: float,
    rng: np.random.Generator,
) -> SelectionResult:
    """Tournament-style approximate k-selection.

    Round t shuffles the survivors, cuts them into chunks of size at most 2k,
    and runs quickselect on each chunk at tolerance ``(epsilon/4)(4/5)^t``
    (the tolerances sum to epsilon) and confidence ``6 delta/(pi^2 t^2 k)``
    per chunk; survivors are the union of chunk selections, and the loop
    stops when exactly k remain. If k already equals the set size the set is
    returned without comparisons.
    """
    pool = _as_items(items)
    if not pool:
        raise EmptySetError("cannot select from an empty set")
    if not 1 <= k <= len(pool):
        raise KOutOfRangeError(f"k must lie in [1, {len(pool)}], got {k}")
    if epsilon <= 0.0 or not 0.0 < delta < 1.0:
        raise ValueError("need epsilon > 0 and delta in (0, 1)")
    if k == len(pool):
        return SelectionResult(frozenset(pool), 0, 0, ())
    start = oracle.count
    trace: list[RoundRecord] = []
    survivors = pool
    t = 0
    while True:
        t += 1
        eps_t = (epsilon / 4.0) * (0.8**t)
        delta_t = 6.0 * delta / (_PI2 * t * t)
        order = rng.permutation(len(survivors))
        shuffled = [survivors[int(i)] for i in order]
        survivors_next: list[int] = []
        for chunk in chunked(shuffled, 2 * k):
            picked = _eqs(
                oracle, chunk, min(k, len(chunk)), eps_t, delta_t / k, rng, []
            )
            survivors_next.extend(picked)
        trace.append(
            RoundRecord(
                index=t,
                size_before=len(survivors),
                size_after=len(survivors_next),
                pivot=None,
                tolerance=eps_t,
                confidence=delta_t,
                child_confidence=delta_t / k,
            )
        )
        survivors = survivors_next
        if len(survivors) == k:
            break
    return SelectionResult(
        selected=frozenset(survivors),
        comparisons=oracle.count - start,
        rounds=t,
        trace=tuple(trace),
    )


def tournament_worst_select(
    oracle: ComparisonOracle,
    items,
    k: int,
    epsilon: float,
    delta: float,
    rng: np.random.Generator,
) -> SelectionResult:
    """Approximate k *worst* items: the tournament selection run against a
    winner-flipped view of the oracle (comparisons land on the shared counter)."""
    return tournament_k_select(flipped(oracle), items, k, epsilon, delta, rng)


def elimination_best_select(
    oracle: ComparisonOracle,
    items,
    delta: float,
    rng: np.random.Generator,
) -> SelectionResult:
    """Exact best-item selection by rounds of pivot-and-eliminate.

    Round t (tolerance ``a = 2^-t``, confidence ``d_t = 6 delta/(pi^2 t^2)``):
    pick a pivot by tournament selection at tolerance a/3 and confidence
    2 d_t/3, distribute every other survivor around it (tolerance a/3, down
    shift a/3, confidence d_t/3 per item), and drop the down bucket. Stops
    when a single item remains. Config id: "seebs".
    """
    pool = _as_items(items)
    if not pool:
        raise EmptySetError("cannot select from an empty set")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    start = oracle.count
    trace: list[RoundRecord] = []
    survivors = pool
    t = 0
    while len(survivors) > 1:
        t += 1
        alpha_t = 2.0**-t
        delta_t = 6.0 * delta / (_PI2 * t * t)
        pivot_result = tournament_k_select(
            oracle, survivors, 1, alpha_t / 3.0, 2.0 * delta_t / 3.0, rng
        )
        (pivot,) = pivot_result.selected
        buckets = Buckets(mid=[pivot])
        params = DiParams(
            epsilon=alpha_t / 3.0,
            shift_up=0.0,
            shift_down=alpha_t / 3.0,
            delta=delta_t / 3.0,
        )
        for item in survivors:
            if item != pivot:
                distribute_item(oracle, item, pivot, params, buckets)
        buckets.check_partition(len(survivors))
        dropped = set(buckets.down)
        survivors_next = [item for item in survivors if item not in dropped]
        trace.append(
            RoundRecord(
                index=t,
                size_before=len(survivors),
                size_after=len(survivors_next),
                pivot=pivot,
                tolerance=alpha_t,
                confidence=delta_t,
                child_confidence=delta_t / 3.0,
            )
        )
        survivors = survivors_next
    return SelectionResult(
        selected=frozenset(survivors),
        comparisons=oracle.count - start,
        rounds=t,
        trace=tuple(trace),
    )


def elimination_k_select(
    oracle: ComparisonOracle,
    items,
    k: int,
    delta: float,
    rng: np.random.Generator,
    pac_selector: str = "tks",
) -> SelectionResult:
    """Exact best-k selection by rounds of pivot-and-eliminate.

    Round t (tolerance ``a = 2^-t``, confidence ``d_t = 6 delta/(pi^2 t^2)``):
    approximately select the remaining target count from the survivors
    (tournament or quickselect per ``pac_selector``; confidence d_t/3), take
    that pool's approximate worst item as the pivot (confidence d_t/3), then
    distribute every other survivor around the pivot with both shifts a/3 and
    per-item confidence ``d_t / (3 (|R|-1))``. Items in the up bucket are
    banked into the answer, the down bucket is discarded, and the target
    count shrinks by the banked amount. Stops when the bank reaches k or
    bank+survivors fit within k; the answer is the bank filled from the
    survivors by ascending index. Config ids: "seeks" (tournament pivot
    pre-selection) and "seeks_v2" (quickselect pre-selection).
    """
    pool = _as_items(items)
    if not pool:
        raise EmptySetError("cannot select from an empty set")
    if not 1 <= k <= len(pool) / 2.0:
        raise KOutOfRangeError(
            f"k must lie in [1, n/2] = [1, {len(pool) / 2:g}], got {k}"
        )
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    if pac_selector not in ("tks", "eqs"):
        raise ValueError(f"pac_selector must be 'tks' or 'eqs', got {pac_selector!r}")
    start = oracle.count
    trace: list[RoundRecord] = []
    flags: list[str] = []
    banked: list[int] = []
    survivors = pool
    k_t = k
    t = 0
    while not (len(banked) >= k or len(banked) + len(survivors) <= k):
        t += 1
        alpha_t = 2.0**-t
        delta_t = 6.0 * delta / (_PI2 * t * t)
        if pac_selector == "tks":
            pre = tournament_k_select(
                oracle, survivors, k_t, alpha_t / 3.0, delta_t / 3.0, rng
            )
        else:
            pre = epsilon_quick_select(
                oracle, survivors, k_t, alpha_t / 3.0, delta_t / 3.0, rng
            )
        pivot_result = tournament_worst_select(
            oracle, sorted(pre.selected), 1, alpha_t / 3.0, delta_t / 3.0, rng
        )
        (pivot,) = pivot_result.selected
        buckets = Buckets(mid=[pivot])
        params = DiParams(
            epsilon=alpha_t / 3.0,
            shift_up=alpha_t / 3.0,
            shift_down=alpha_t / 3.0,
            delta=delta_t / (3.0 * (len(survivors) - 1)),
        )
        for item in survivors:
            if item != pivot:
                distribute_item(oracle, item, pivot, params, buckets)
        buckets.check_partition(len(survivors))
        raised = set(buckets.up)
        dropped = set(buckets.down)
        banked.extend(buckets.up)
        survivors = [
            item for item in survivors if item not in raised and item not in dropped
        ]
        k_t -= len(raised)
        trace.append(
            RoundRecord(
                index=t,
                size_before=len(survivors) + len(raised) + len(dropped),
                size_after=len(survivors),
                pivot=pivot,
                tolerance=alpha_t,
                confidence=delta_t,
                child_confidence=params.delta,
                kept=len(banked),
            )
        )
    if len(banked) > k:
        # Reachable only through comparison errors; keep the k smallest indices.
        banked = sorted(banked)[:k]
        flags.append("overfilled")
        chosen = banked
    elif len(banked) == k:
        chosen = banked
    else:
        need = k - len(banked)
        fill = sorted(survivors)[:need]
        chosen = banked + fill
        if len(fill) < need:
            # Too many discards (comparison errors); pad to keep |selected| = k.
            discarded = sorted(set(pool) - set(banked) - set(survivors))
            chosen = chosen + discarded[: need - len(fill)]
            flags.append("underfilled")
    return SelectionResult(
        selected=frozenset(chosen),
        comparisons=oracle.count - start,
        rounds=t,
        trace=tuple(trace),
        flags=tuple(flags),
    )
