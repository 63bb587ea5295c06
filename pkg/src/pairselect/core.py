"""Shared domain types: preference matrices, rankings, gap vectors, selection results.

All items are dense 0-based integer indices. A preference instance is an
``n x n`` matrix ``p`` where ``p[i, j]`` is the probability that item ``i``
wins a single comparison against item ``j``; rows/columns satisfy
``p[i, j] + p[j, i] = 1`` with ``p[i, i] = 1/2``. An instance is
*strict-order* when no off-diagonal entry equals exactly 1/2, so the relation
``i beats j  <=>  p[i, j] > 1/2`` can define a ranking.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ANTISYMMETRY_TOL = 1e-12


class PairSelectError(Exception):
    """Base class for all domain errors raised by this package."""


class NotStrictOrderError(PairSelectError):
    """Some off-diagonal win probability equals exactly 1/2."""


class CyclicPreferenceError(PairSelectError):
    """The beats-relation of the matrix is not a total order."""


class IdenticalItemsError(PairSelectError, ValueError):
    """An operation that needs two distinct items was given the same item twice."""


class KOutOfRangeError(PairSelectError, ValueError):
    """Requested subset size k is outside the legal range for the call."""


class EmptySetError(PairSelectError, ValueError):
    """An operation that needs at least one item received none."""


class PreferenceInstance:
    """Immutable full pairwise win-probability matrix.

    Construction validates shape, range, the antisymmetry
    ``p + p.T == 1`` (within ``ANTISYMMETRY_TOL``) and the 1/2 diagonal.
    The matrix array is frozen (not writeable) after construction.
    """

    __slots__ = ("_p", "_n", "_strict")

    def __init__(self, p) -> None:
        mat = np.array(p, dtype=np.float64)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"preference matrix must be square, got shape {mat.shape}")
        n = mat.shape[0]
        if n == 0:
            raise ValueError("preference matrix must have at least one item")
        if np.any(~np.isfinite(mat)) or mat.min() < 0.0 or mat.max() > 1.0:
            raise ValueError("win probabilities must be finite and within [0, 1]")
        if np.any(np.abs(np.diagonal(mat) - 0.5) > 0.0):
            raise ValueError("diagonal entries must equal 1/2 exactly")
        asym = np.abs(mat + mat.T - 1.0)
        worst = float(asym.max(initial=0.0))
        if worst > ANTISYMMETRY_TOL:
            i, j = np.unravel_index(int(asym.argmax()), asym.shape)
            raise ValueError(
                f"p[{i},{j}] + p[{j},{i}] deviates from 1 by {worst:.3e} "
                f"(tolerance {ANTISYMMETRY_TOL:g})"
            )
        mat.setflags(write=False)
        self._p = mat
        self._n = n
        off = ~np.eye(n, dtype=bool)
        self._strict = not bool(np.any(mat[off] == 0.5))

    @property
    def p(self) -> np.ndarray:
        return self._p

    @property
    def n(self) -> int:
        return self._n

    @property
    def strict_order(self) -> bool:
        """True when no off-diagonal entry equals exactly 1/2."""
        return self._strict

    def flipped(self) -> "PreferenceInstance":
        """Instance with every winner inverted (reverses the ranking)."""
        q = 1.0 - self._p
        np.fill_diagonal(q, 0.5)
        return PreferenceInstance(q)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"PreferenceInstance(n={self._n}, strict_order={self._strict})"


@dataclass(frozen=True)
class Ranking:
    """A permutation of the items, best first."""

    order: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.order)
        if sorted(self.order) != list(range(n)):
            raise ValueError("ranking must be a permutation of 0..n-1")

    def __len__(self) -> int:
        return len(self.order)

    def top(self, k: int) -> frozenset[int]:
        return frozenset(self.order[:k])


@dataclass(frozen=True)
class GapVector:
    """Per-item difficulty gaps for an exact top-k split.

    ``delta_pair[i, j] = |p[i, j] - 1/2|`` measures how hard the pair (i, j)
    is to order. ``delta_item[i]`` is the gap of item i relative to the k/k+1
    boundary of the true ranking: the pair gap to the (k+1)-th item for items
    ranked in the top k, and the pair gap to the k-th item otherwise. The
    boundary items share one value by construction.
    """

    k: int
    delta_item: np.ndarray
    delta_pair: np.ndarray


@dataclass(frozen=True)
class SelectionParams:
    """Target size, error tolerance (PAC only) and confidence for a selection run."""

    k: int
    delta: float
    epsilon: float | None = None

    def __post_init__(self) -> None:
        if self.k < 1:
            raise KOutOfRangeError(f"k must be >= 1, got {self.k}")
        if not 0.0 < self.delta < 0.5:
            raise ValueError(f"delta must lie in (0, 1/2), got {self.delta}")
        if self.epsilon is not None and not 0.0 < self.epsilon < 0.5:
            raise ValueError(f"epsilon must lie in (0, 1/2), got {self.epsilon}")


@dataclass(frozen=True)
class RoundRecord:
    """One outer-loop round of a selection algorithm (for traces and tests)."""

    index: int
    size_before: int
    size_after: int
    pivot: int | None
    tolerance: float
    confidence: float
    child_confidence: float | None = None
    kept: int | None = None


@dataclass(frozen=True)
class SelectionResult:
    """Outcome of one selection run.

    ``comparisons`` equals the oracle counter delta over the call.
    ``flags`` is empty in normal operation; it records low-probability
    repair paths (e.g. a k-set that had to be truncated or padded).
    """

    selected: frozenset[int]
    comparisons: int
    rounds: int
    trace: tuple[RoundRecord, ...] = ()
    flags: tuple[str, ...] = field(default=())


def ranking_of(instance: PreferenceInstance) -> Ranking:
    """Ranking induced by the beats-relation ``p[i, j] > 1/2``.

    The relation is a total order exactly when the win counts (out-degrees of
    the beats-digraph) are a permutation of ``{0, ..., n-1}``; that check is
    O(n^2) and matches the dense matrix representation.

    Raises:
        NotStrictOrderError: some off-diagonal entry equals 1/2.
        CyclicPreferenceError: the relation has a cycle.
    """
    if not instance.strict_order:
        p = instance.p
        off = ~np.eye(instance.n, dtype=bool)
        i, j = np.argwhere((p == 0.5) & off)[0]
        raise NotStrictOrderError(f"p[{i},{j}] = 1/2: no strict order over items")
    wins = (instance.p > 0.5).sum(axis=1)
    order = np.argsort(-wins, kind="stable")
    if sorted(wins.tolist()) != list(range(instance.n)):
        raise CyclicPreferenceError(
            "beats-relation is not a total order (win counts "
            f"{sorted(wins.tolist())} are not 0..n-1)"
        )
    return Ranking(tuple(int(x) for x in order))


def true_best_k(instance: PreferenceInstance, k: int) -> frozenset[int]:
    """The top-k items of the ranking induced by the beats-relation."""
    if not 1 <= k <= instance.n:
        raise KOutOfRangeError(f"k must lie in [1, {instance.n}], got {k}")
    return ranking_of(instance).top(k)


def gap_vector(instance: PreferenceInstance, k: int) -> GapVector:
    """Per-item gaps relative to the k/(k+1) boundary of the true ranking.

    ``k = n`` is disallowed: the boundary needs a (k+1)-th item.
    """
    if not 1 <= k < instance.n:
        raise KOutOfRangeError(f"k must lie in [1, n-1] = [1, {instance.n - 1}], got {k}")
    ranking = ranking_of(instance)
    # Mirror the upper triangle so pair gaps are exactly symmetric.
    upper = np.triu(np.abs(instance.p - 0.5), k=1)
    pair = upper + upper.T
    pair.setflags(write=False)
    r_k = ranking.order[k - 1]
    r_k1 = ranking.order[k]
    item = np.empty(instance.n, dtype=np.float64)
    for pos, it in enumerate(ranking.order):
        if pos < k:
            item[it] = pair[it, r_k1]
        else:
            item[it] = pair[r_k, it]
    item.setflags(write=False)
    return GapVector(k=k, delta_item=item, delta_pair=pair)
