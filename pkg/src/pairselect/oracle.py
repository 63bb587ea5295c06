"""Noisy comparison oracles: synthetic generators, counting wrappers, reductions.

Every selection algorithm talks to an oracle through a single method:
``compare(i, j)`` returns the winning item of one independent noisy
comparison and bumps a query counter. Matrix-backed oracles additionally
offer a block-simulation fast path (``outcome_block`` / ``record_queries``)
that lets adaptive callers draw candidate outcomes in bulk and commit only
the queries they actually consumed; committed counts and outcome
distributions are identical to repeated ``compare`` calls.

Also here: the two bandit-arm reduction duels. ``duel_bernoulli_p1``
resolves one comparison by sampling Bernoulli arms uniformly until a success
(winner odds ``mu_i : mu_j``); ``duel_gaussian_p2`` draws one unit-variance
Gaussian reward per arm and returns the larger (winner probability
``Phi((mu_i - mu_j) / sqrt(2))``).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .core import IdenticalItemsError, PreferenceInstance

# Gap intervals for the unequal-noise generator: the protocol draws the gap
# of each pair from Uniform(0.5*D, 1.5*D) with D = 0.1; an alternative wider
# preset with gaps in (0.05, 0.2) is kept alongside it.
UNIFORM_GAP_DEFAULT = (0.05, 0.15)
UNIFORM_GAP_WIDE = (0.05, 0.20)

_SEED_MOD = 2**64


def _seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(int(seed) % _SEED_MOD)


class ComparisonOracle:
    """Interface shared by all oracles: one noisy comparison per query."""

    @property
    def n(self) -> int:
        raise NotImplementedError

    @property
    def count(self) -> int:
        """Total comparisons served so far."""
        raise NotImplementedError

    def compare(self, i: int, j: int) -> int:
        """Serve one comparison of distinct items i and j; returns the winner."""
        raise NotImplementedError

    def _check_pair(self, i: int, j: int) -> None:
        if i == j:
            raise IdenticalItemsError(f"cannot compare item {i} with itself")
        n = self.n
        if not (0 <= i < n and 0 <= j < n):
            raise IndexError(f"items ({i}, {j}) out of range for n={n}")


class MatrixOracle(ComparisonOracle):
    """Samples winners from a fixed preference matrix."""

    def __init__(self, instance: PreferenceInstance, rng: np.random.Generator) -> None:
        self.instance = instance
        self._p = instance.p
        self._rng = rng
        self._count = 0

    @property
    def n(self) -> int:
        return self.instance.n

    @property
    def count(self) -> int:
        return self._count

    def compare(self, i: int, j: int) -> int:
        self._check_pair(i, j)
        self._count += 1
        return i if self._rng.random() < self._p[i, j] else j

    def outcome_block(self, i: int, j: int, m: int) -> np.ndarray:
        """Simulate ``m`` independent would-be outcomes of ``compare(i, j)``.

        Returns a boolean array (True where i would win). Nothing is counted;
        an adaptive caller that consumes only a prefix must report it through
        ``record_queries``. Unconsumed tail outcomes are discarded, which
        leaves the committed outcome sequence i.i.d. and the counter equal to
        the number of comparisons actually used.
        """
        self._check_pair(i, j)
        return self._rng.random(m) < self._p[i, j]

    def record_queries(self, m: int) -> None:
        self._count += m


class FlippedOracle(ComparisonOracle):
    """Winner-inverting view of another oracle; shares its query counter."""

    def __init__(self, inner: ComparisonOracle) -> None:
        self.inner = inner

    @property
    def n(self) -> int:
        return self.inner.n

    @property
    def count(self) -> int:
        return self.inner.count

    def compare(self, i: int, j: int) -> int:
        winner = self.inner.compare(i, j)
        return j if winner == i else i

    def outcome_block(self, i: int, j: int, m: int) -> np.ndarray:
        return ~self.inner.outcome_block(i, j, m)  # type: ignore[attr-defined]

    def record_queries(self, m: int) -> None:
        self.inner.record_queries(m)  # type: ignore[attr-defined]


def flipped(oracle: ComparisonOracle) -> ComparisonOracle:
    """Oracle whose query (i, j) returns j exactly when the inner one returns i."""
    if isinstance(oracle, FlippedOracle):
        return oracle.inner
    if isinstance(oracle, MatrixOracle) or hasattr(oracle, "outcome_block"):
        return FlippedOracle(oracle)
    return FlippedOracle(oracle)


# ---------------------------------------------------------------------------
# Matrix constructors
# ---------------------------------------------------------------------------


def _assemble(n: int, upper) -> PreferenceInstance:
    """Build a matrix from a function of ranked pairs, enforcing exact antisymmetry."""
    p = np.full((n, n), 0.5, dtype=np.float64)
    for i in range(n):
        for j in range(i + 1, n):
            w = upper(i, j)
            p[i, j] = w
            p[j, i] = 1.0 - w
    return PreferenceInstance(p)


def equal_gap_matrix(n: int, p_win: float) -> PreferenceInstance:
    """Every higher-ranked item beats every lower-ranked one with probability p_win."""
    if not 0.5 < p_win <= 1.0:
        raise ValueError(f"p_win must lie in (1/2, 1], got {p_win}")
    if n < 1:
        raise ValueError("n must be >= 1")
    return _assemble(n, lambda i, j: p_win)


def uniform_gap_matrix(
    n: int, lo: float, hi: float, rng: np.random.Generator
) -> PreferenceInstance:
    """Per-pair gaps drawn i.i.d. from Uniform(lo, hi); identity ranking."""
    if not 0.0 < lo <= hi <= 0.5:
        raise ValueError(f"need 0 < lo <= hi <= 1/2, got ({lo}, {hi})")
    if n < 1:
        raise ValueError("n must be >= 1")
    gaps = rng.uniform(lo, hi, size=n * (n - 1) // 2)
    it = iter(gaps)
    return _assemble(n, lambda i, j: 0.5 + next(it))


def mnl_matrix(scores) -> PreferenceInstance:
    """Win probabilities ``score_i / (score_i + score_j)`` from positive scores."""
    theta = np.asarray(scores, dtype=np.float64)
    if theta.ndim != 1 or theta.size < 1:
        raise ValueError("scores must be a non-empty 1-d sequence")
    if np.any(theta <= 0.0) or np.any(~np.isfinite(theta)):
        raise ValueError("all scores must be positive and finite")
    return _assemble(theta.size, lambda i, j: theta[i] / (theta[i] + theta[j]))


def thurstone_matrix(scores, sigma: float) -> PreferenceInstance:
    """Win probability of i over j is ``Phi((score_i - score_j) / (sigma * sqrt(2)))``.

    Equivalently: each comparison adds independent Gaussian(0, sigma^2) noise
    to both scores and the larger perturbed score wins. Evaluated through the
    complementary error function: ``Phi(d / (s*sqrt(2))) = erfc(-d / (2s)) / 2``.
    """
    theta = np.asarray(scores, dtype=np.float64)
    if theta.ndim != 1 or theta.size < 1:
        raise ValueError("scores must be a non-empty 1-d sequence")
    if not (np.isfinite(sigma) and sigma > 0.0):
        raise ValueError(f"sigma must be positive, got {sigma}")
    if np.any(~np.isfinite(theta)):
        raise ValueError("scores must be finite")
    return _assemble(
        theta.size, lambda i, j: 0.5 * math.erfc(-(theta[i] - theta[j]) / (2.0 * sigma))
    )


# ---------------------------------------------------------------------------
# Oracle factories
# ---------------------------------------------------------------------------


def make_equal_gap(n: int, p_win: float, seed) -> MatrixOracle:
    ss = _seed_sequence(seed)
    return MatrixOracle(equal_gap_matrix(n, p_win), np.random.default_rng(ss))


def make_uniform_gap(
    n: int, lo: float, hi: float, seed, enforce: bool = False, max_attempts: int = 1000
) -> MatrixOracle:
    """Random-gap oracle. The generated instance may violate SST/STI.

    With ``enforce=True`` whole instances are resampled until both validators
    pass (up to ``max_attempts``, then an error).
    """
    ss = _seed_sequence(seed)
    inst_ss, query_ss = ss.spawn(2)
    inst_rng = np.random.default_rng(inst_ss)
    instance = uniform_gap_matrix(n, lo, hi, inst_rng)
    if enforce:
        from .verify import validate_sst, validate_sti

        attempts = 1
        while not (validate_sst(instance).passed and validate_sti(instance).passed):
            if attempts >= max_attempts:
                raise RuntimeError(
                    f"no SST+STI instance found in {max_attempts} attempts "
                    f"for n={n}, gaps in ({lo}, {hi})"
                )
            instance = uniform_gap_matrix(n, lo, hi, inst_rng)
            attempts += 1
    return MatrixOracle(instance, np.random.default_rng(query_ss))


def make_mnl(scores, seed) -> MatrixOracle:
    return MatrixOracle(mnl_matrix(scores), np.random.default_rng(_seed_sequence(seed)))


def make_thurstone(scores, sigma: float, seed) -> MatrixOracle:
    return MatrixOracle(
        thurstone_matrix(scores, sigma), np.random.default_rng(_seed_sequence(seed))
    )


def make_empirical(instance: PreferenceInstance, seed) -> MatrixOracle:
    return MatrixOracle(instance, np.random.default_rng(_seed_sequence(seed)))


# ---------------------------------------------------------------------------
# Instance specifications (JSON-serializable harness configs)
# ---------------------------------------------------------------------------

_MODELS = ("equal_gap", "uniform_gap", "mnl", "thurstone", "empirical")


@dataclass(frozen=True)
class InstanceSpec:
    """Declarative description of an oracle, serializable as JSON.

    Fields by model:
      equal_gap:   n, p
      uniform_gap: n, lo, hi, enforce
      mnl:         scores
      thurstone:   scores, sigma
      empirical:   source (path to a .pwg file or a normalized-instance JSON),
                   missing ("error" or "half")
    ``seed`` drives instance generation and the query stream when the oracle
    is built directly from the spec; the experiment harness supersedes it
    with per-trial derived streams.
    """

    model: str
    n: int | None = None
    p: float | None = None
    lo: float | None = None
    hi: float | None = None
    enforce: bool = False
    scores: tuple[float, ...] | None = None
    sigma: float | None = None
    source: str | None = None
    missing: str = "error"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.model not in _MODELS:
            raise ValueError(f"instance.model: unknown model {self.model!r}")
        if self.model in ("equal_gap", "uniform_gap"):
            if self.n is None or self.n < 1:
                raise ValueError("instance.n: required positive integer")
        if self.model == "equal_gap" and self.p is None:
            raise ValueError("instance.p: required for equal_gap")
        if self.model == "uniform_gap" and (self.lo is None or self.hi is None):
            raise ValueError("instance.lo/instance.hi: required for uniform_gap")
        if self.model in ("mnl", "thurstone") and not self.scores:
            raise ValueError("instance.scores: required for mnl/thurstone")
        if self.model == "thurstone" and self.sigma is None:
            raise ValueError("instance.sigma: required for thurstone")
        if self.model == "empirical" and not self.source:
            raise ValueError("instance.source: required for empirical")
        if self.missing not in ("error", "half"):
            raise ValueError(f"instance.missing: must be 'error' or 'half', got {self.missing!r}")

    def item_count(self) -> int:
        if self.scores is not None:
            return len(self.scores)
        if self.n is not None:
            return self.n
        return self.build_instance().n

    def with_n(self, n: int) -> "InstanceSpec":
        if self.model not in ("equal_gap", "uniform_gap"):
            raise ValueError(f"cannot sweep n for model {self.model!r}")
        return InstanceSpec(**{**self.to_dict(), "n": n})

    def build_instance(self, rng: np.random.Generator | None = None) -> PreferenceInstance:
        """Materialize the preference matrix. ``rng`` feeds random-instance models."""
        if self.model == "equal_gap":
            return equal_gap_matrix(self.n, self.p)
        if self.model == "uniform_gap":
            if rng is None:
                rng = np.random.default_rng(_seed_sequence(self.seed).spawn(2)[0])
            return uniform_gap_matrix(self.n, self.lo, self.hi, rng)
        if self.model == "mnl":
            return mnl_matrix(self.scores)
        if self.model == "thurstone":
            return thurstone_matrix(self.scores, self.sigma)
        from .ingest import load_instance_file

        return load_instance_file(self.source, missing_policy=self.missing)

    def build_oracle(self, seed=None) -> MatrixOracle:
        """Build the oracle; ``seed`` (int or SeedSequence) overrides ``self.seed``."""
        ss = _seed_sequence(self.seed if seed is None else seed)
        inst_ss, query_ss = ss.spawn(2)
        instance = self.build_instance(np.random.default_rng(inst_ss))
        return MatrixOracle(instance, np.random.default_rng(query_ss))

    def to_dict(self) -> dict:
        out: dict = {"model": self.model, "seed": self.seed}
        if self.model in ("equal_gap", "uniform_gap"):
            out["n"] = self.n
        if self.model == "equal_gap":
            out["p"] = self.p
        if self.model == "uniform_gap":
            out["lo"] = self.lo
            out["hi"] = self.hi
            if self.enforce:
                out["enforce"] = True
        if self.model in ("mnl", "thurstone"):
            out["scores"] = list(self.scores)
        if self.model == "thurstone":
            out["sigma"] = self.sigma
        if self.model == "empirical":
            out["source"] = self.source
            out["missing"] = self.missing
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "InstanceSpec":
        if not isinstance(data, dict):
            raise ValueError("instance: must be a JSON object")
        known = {
            "model", "n", "p", "lo", "hi", "enforce", "scores", "sigma",
            "source", "missing", "seed",
        }
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"instance.{sorted(unknown)[0]}: unknown field")
        kwargs = dict(data)
        if "scores" in kwargs and kwargs["scores"] is not None:
            kwargs["scores"] = tuple(float(x) for x in kwargs["scores"])
        return cls(**kwargs)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "InstanceSpec":
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# Bandit-arm reduction duels
# ---------------------------------------------------------------------------


def duel_bernoulli_p1(
    mu_i: float, mu_j: float, rng: np.random.Generator
) -> tuple[int, int]:
    """One comparison resolved by uniformly sampling two Bernoulli arms.

    Repeats {pick an arm uniformly at random, draw Bernoulli(mu)} until a 1
    is drawn and returns that arm: 0 for the first arm, 1 for the second,
    together with the number of arm pulls used. The first arm wins with
    probability ``mu_i / (mu_i + mu_j)``; the pull count is geometric with
    success probability ``(mu_i + mu_j) / 2``.
    """
    for name, mu in (("mu_i", mu_i), ("mu_j", mu_j)):
        if not 0.0 <= mu <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {mu}")
    if mu_i + mu_j == 0.0:
        raise ValueError("both arm means are zero: the duel would never resolve")
    pulls = 0
    while True:
        arm = int(rng.integers(2))
        pulls += 1
        if rng.random() < (mu_i if arm == 0 else mu_j):
            return arm, pulls


def duel_gaussian_p2(
    mu_i: float, mu_j: float, rng: np.random.Generator
) -> tuple[int, int]:
    """One comparison resolved by one unit-variance Gaussian reward per arm.

    Returns (0 if the first arm's reward is strictly larger else 1, pulls=2).
    Ties (measure zero) go to the second arm, matching the strict inequality.
    """
    r_i = mu_i + rng.standard_normal()
    r_j = mu_j + rng.standard_normal()
    return (0 if r_i > r_j else 1), 2


class BernoulliArmsOracle(ComparisonOracle):
    """Comparison oracle over Bernoulli arms, one duel per query.

    Induces the same winner distribution as an MNL instance with the arm
    means as scores. ``pulls`` counts individual arm samples.
    """

    def __init__(self, means, rng: np.random.Generator) -> None:
        mus = [float(m) for m in means]
        if not mus:
            raise ValueError("need at least one arm")
        for m in mus:
            if not 0.0 < m <= 1.0:
                raise ValueError(f"arm means must lie in (0, 1], got {m}")
        self.means = tuple(mus)
        self._rng = rng
        self._count = 0
        self.pulls = 0

    @property
    def n(self) -> int:
        return len(self.means)

    @property
    def count(self) -> int:
        return self._count

    def compare(self, i: int, j: int) -> int:
        self._check_pair(i, j)
        winner, pulls = duel_bernoulli_p1(self.means[i], self.means[j], self._rng)
        self._count += 1
        self.pulls += pulls
        return i if winner == 0 else j


class GaussianArmsOracle(ComparisonOracle):
    """Comparison oracle over unit-variance Gaussian arms, one duel per query.

    Induces the same winner distribution as score-noise comparisons with
    sigma = 1 over the arm means. ``pulls`` counts individual arm samples.
    """

    def __init__(self, means, rng: np.random.Generator) -> None:
        mus = [float(m) for m in means]
        if not mus:
            raise ValueError("need at least one arm")
        self.means = tuple(mus)
        self._rng = rng
        self._count = 0
        self.pulls = 0

    @property
    def n(self) -> int:
        return len(self.means)

    @property
    def count(self) -> int:
        return self._count

    def compare(self, i: int, j: int) -> int:
        self._check_pair(i, j)
        winner, pulls = duel_gaussian_p2(self.means[i], self.means[j], self._rng)
        self._count += 1
        self.pulls += pulls
        return i if winner == 0 else j
