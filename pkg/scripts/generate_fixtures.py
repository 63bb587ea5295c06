#!/usr/bin/env python3
"""Regenerate the bundled .pwg fixtures under tests/data/.

The public election datasets these mirror are not redistributed with the
repository; instead two synthetic stand-ins with the same shape are generated
deterministically:

  irish_election.pwg   12 candidates, 43,942 ballots, every pair voted on.
                       The win matrix has a strict tournament order equal to
                       its Borda order, deliberate violations of strong
                       stochastic transitivity and of the gap triangle
                       inequality, a minimal relaxation factor below 5, and a
                       clear top-4 boundary.
  web_search.pwg       28 pages, 1,134 total samples spread sparsely over the
                       pairs, so many pairs carry no votes at all and several
                       are exactly tied (exercises the missing-pair policy
                       and Borda fallback).

Run from the repository root:  python scripts/generate_fixtures.py
"""

from __future__ import annotations

import pathlib
import sys

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from pairselect.core import PreferenceInstance, ranking_of  # noqa: E402
from pairselect.ingest import borda_ranking, parse_pwg, to_preference_instance  # noqa: E402
from pairselect.verify import validate_gamma, validate_sst, validate_sti  # noqa: E402

DATA_DIR = pathlib.Path(__file__).resolve().parents[1] / "tests" / "data"

IRISH_N = 12
IRISH_BALLOTS = 43942
WEB_N = 28
WEB_SAMPLES = 1134


def irish_ranked_matrix() -> np.ndarray:
    """Win matrix in ranked position space (position 0 = strongest)."""
    strengths = np.array(
        [0.92, 0.90, 0.88, 0.80, 0.60, 0.55, 0.50, 0.45, 0.40, 0.30, 0.20, 0.10]
    )
    n = IRISH_N
    q = np.full((n, n), 0.5)
    for a in range(n):
        for c in range(a + 1, n):
            gap = np.clip(0.8 * (strengths[a] - strengths[c]), 0.02, 0.42)
            q[a, c] = 0.5 + gap
            q[c, a] = 1.0 - q[a, c]

    def set_pair(a, c, value):
        q[a, c] = value
        q[c, a] = 1.0 - value

    # Triangle-inequality violation among the top three: the 0-2 gap far
    # exceeds the 0-1 and 1-2 gaps combined (ratio 0.15/0.04 = 3.75 < 5).
    set_pair(0, 1, 0.52)
    set_pair(1, 2, 0.52)
    set_pair(0, 2, 0.65)
    # Strong-transitivity violation further down: 7 beats 9 more weakly than
    # it beats 8.
    set_pair(7, 8, 0.62)
    set_pair(8, 9, 0.58)
    set_pair(7, 9, 0.55)
    # Clear boundary between ranks 4 and 5 (top-4 selection target).
    set_pair(3, 4, 0.60)
    return q


def write_pwg(path, n, labels, counts, totals):
    lines = [str(n)]
    for idx, label in enumerate(labels, start=1):
        lines.append(f"{idx}, {label}")
    lines.append(", ".join(str(t) for t in totals))
    for (i, j), count in sorted(counts.items()):
        lines.append(f"{count}, {i + 1}, {j + 1}")
    path.write_text("\n".join(lines) + "\n")


def make_irish(path) -> None:
    rng = np.random.default_rng(20020517)  # deterministic fixture stream
    q = irish_ranked_matrix()
    # Scatter the ranked positions across candidate numbers.
    perm = rng.permutation(IRISH_N)  # perm[position] = candidate index
    counts = {}
    for a in range(IRISH_N):
        for c in range(a + 1, IRISH_N):
            total = int(rng.integers(28000, IRISH_BALLOTS + 1))
            wins = int(round(total * q[a, c]))
            if 2 * wins == total:  # keep every pair strictly decided
                wins += 1
            i, j = int(perm[a]), int(perm[c])
            counts[(i, j)] = wins
            counts[(j, i)] = total - wins
    labels = [f"Candidate {chr(ord('A') + i)}" for i in range(IRISH_N)]
    write_pwg(path, IRISH_N, labels, counts, (IRISH_BALLOTS, sum(counts.values()), 0))

    # Sanity: the parsed fixture must exhibit the documented properties.
    doc = parse_pwg(path.read_text())
    instance = to_preference_instance(doc, missing_policy="error")
    assert instance.n == IRISH_N
    assert instance.strict_order
    ranking = ranking_of(instance)
    borda, _ = borda_ranking(instance)
    assert ranking.order == borda.order, "tournament and Borda order must agree"
    assert tuple(perm[a] for a in range(IRISH_N)) == ranking.order
    assert not validate_sst(instance).passed
    assert not validate_sti(instance).passed
    verdict = validate_gamma(instance, 5.0)
    assert verdict.passed, f"minimal gamma {verdict.minimal_gamma} too large"
    assert verdict.minimal_gamma > 1.0
    print(f"irish fixture ok: minimal gamma {verdict.minimal_gamma}, order {ranking.order}")


def make_web(path) -> None:
    rng = np.random.default_rng(47)
    strengths = np.linspace(1.8, 0.2, WEB_N)
    pairs = [(i, j) for i in range(WEB_N) for j in range(i + 1, WEB_N)]
    rng.shuffle(pairs)
    covered = pairs[: int(len(pairs) * 0.55)]  # leave many pairs unobserved
    weights = rng.random(len(covered))
    raw = weights / weights.sum() * WEB_SAMPLES
    totals = np.maximum(1, np.round(raw).astype(int))
    while totals.sum() > WEB_SAMPLES:
        totals[int(np.argmax(totals))] -= 1
    while totals.sum() < WEB_SAMPLES:
        totals[int(np.argmin(totals))] += 1
    counts = {}
    for (i, j), total in zip(covered, totals.tolist()):
        p = strengths[i] / (strengths[i] + strengths[j])
        wins = int(rng.binomial(total, p))
        if wins:
            counts[(i, j)] = wins
        if total - wins:
            counts[(j, i)] = total - wins
    labels = [f"page{i:02d}" for i in range(WEB_N)]
    write_pwg(path, WEB_N, labels, counts, (WEB_SAMPLES, WEB_SAMPLES, 0))

    doc = parse_pwg(path.read_text())
    assert doc.n == WEB_N
    assert sum(doc.counts.values()) == WEB_SAMPLES
    instance = to_preference_instance(doc, missing_policy="half")
    assert not instance.strict_order  # unobserved pairs sit at 1/2
    assert not validate_sst(instance).passed
    print(f"web fixture ok: {len(doc.counts)} directed counts, {WEB_SAMPLES} samples")


def main() -> None:
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    make_irish(DATA_DIR / "irish_election.pwg")
    make_web(DATA_DIR / "web_search.pwg")


if __name__ == "__main__":
    main()
