"""Sample-complexity bound expressions (unit constants, natural logs).

These evaluate the asymptotic complexity expressions of the selection
problems as plain numbers so their growth can be tabulated and plotted.
They are Theta-expressions with all constant factors set to one — not
predictions of comparison counts. Double-log terms ``ln ln(1/gap)`` are
clamped to zero once ``gap >= 1/e`` (where the expression stops being
meaningful), keeping tables well-defined.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .core import PairSelectError

THETA_NOTE = "Theta-expressions with unit constants; not comparison counts"


class ZeroGapError(PairSelectError, ValueError):
    """A gap-dependent bound was queried with a non-positive gap."""


@dataclass(frozen=True)
class BoundQuery:
    """Arguments of the bound expressions.

    ``gaps`` (per-item boundary gaps) is required by the exact-selection
    bounds only; the boundary gap of the k-th ranked item is taken as the
    smallest entry, which is exact whenever the gaps come from a
    transitivity-respecting instance.
    """

    n: int
    k: int
    delta: float
    epsilon: float | None = None
    gaps: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not 1 <= self.k <= self.n:
            raise ValueError(f"k must lie in [1, n], got {self.k}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if self.gaps is not None and len(self.gaps) != self.n:
            raise ValueError(f"gaps must have length n={self.n}, got {len(self.gaps)}")

    @classmethod
    def uniform(
        cls, n: int, k: int, delta: float, gap: float, epsilon: float | None = None
    ) -> "BoundQuery":
        return cls(n=n, k=k, delta=delta, epsilon=epsilon, gaps=(gap,) * n)


def _checked_gaps(query: BoundQuery) -> tuple[float, ...]:
    if query.gaps is None:
        raise ValueError("this bound needs per-item gaps")
    for g in query.gaps:
        if not g > 0.0:
            raise ZeroGapError(f"all gaps must be positive, got {g}")
    return query.gaps


def _loglog(gap: float) -> float:
    """ln ln(1/gap), clamped to 0 when gap >= 1/e."""
    if gap >= 1.0 / math.e:
        return 0.0
    return math.log(math.log(1.0 / gap))


def pac_lower_bound(query: BoundQuery) -> float:
    """Approximate-selection floor: ``n * epsilon^-2 * ln(k / delta)``.

    The underlying statement holds for epsilon < 1/128 and delta < e^-4/4;
    values outside those ranges evaluate anyway with a warning.
    """
    if query.epsilon is None or query.epsilon <= 0.0:
        raise ValueError("pac_lower_bound needs epsilon > 0")
    if query.epsilon >= 1.0 / 128.0 or query.delta >= math.exp(-4.0) / 4.0:
        warnings.warn(
            "epsilon/delta outside the ranges of the floor statement; "
            "evaluating the expression anyway",
            stacklevel=2,
        )
    return query.n * query.epsilon**-2 * math.log(query.k / query.delta)


def exact_lower_bound(query: BoundQuery) -> float:
    """Exact-selection floor: ``sum_i gap_i^-2 ln(1/delta) + ln ln(1/gap_rk)``."""
    gaps = _checked_gaps(query)
    total = sum(g**-2 for g in gaps) * math.log(1.0 / query.delta)
    return total + _loglog(min(gaps))


def seebs_upper_bound(query: BoundQuery) -> float:
    """Best-item ceiling: ``sum_{i != best} gap_i^-2 (ln(1/delta) + ln ln(1/gap_i))``.

    The best item shares the smallest gap with the runner-up; one such term
    is excluded from the sum.
    """
    gaps = _checked_gaps(query)
    log_delta = math.log(1.0 / query.delta)
    term = lambda g: g**-2 * (log_delta + _loglog(g))  # noqa: E731
    return sum(term(g) for g in gaps) - term(min(gaps))


def seeks_upper_bound(query: BoundQuery) -> float:
    """Best-k ceiling: ``sum_i gap_i^-2 (ln(n/delta) + ln ln(1/gap_i))``."""
    gaps = _checked_gaps(query)
    log_nd = math.log(query.n / query.delta)
    return sum(g**-2 * (log_nd + _loglog(g)) for g in gaps)


@dataclass(frozen=True)
class GrowthRow:
    n: int
    lower: float
    upper_k1: float
    upper_kgt1: float


def growth_table(
    delta_gap: float, delta_conf: float, k: int, n_grid
) -> list[GrowthRow]:
    """Evaluate the three exact-selection bounds with every gap set to
    ``delta_gap`` across a grid of item counts."""
    grid = [int(n) for n in n_grid]
    if not grid:
        raise ValueError("n_grid must be non-empty")
    rows = []
    for n in grid:
        query = BoundQuery.uniform(n=n, k=min(k, n), delta=delta_conf, gap=delta_gap)
        rows.append(
            GrowthRow(
                n=n,
                lower=exact_lower_bound(query),
                upper_k1=seebs_upper_bound(query),
                upper_kgt1=seeks_upper_bound(query),
            )
        )
    return rows
