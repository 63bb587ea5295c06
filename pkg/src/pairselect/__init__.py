"""Active selection of the best-k items from noisy pairwise comparisons.

Library layout:
  core       shared domain types (instances, rankings, gaps, results)
  oracle     comparison oracles, synthetic generators, bandit-arm reductions
  ingest     PrefLib pairwise-file parsing and Borda ground truth
  selection  the adaptive selection algorithms
  verify     optimality verdicts, transitivity validators, brute force
  bounds     sample-complexity bound expressions and growth tables
  harness    seeded multi-trial experiment runner with CSV output
  cli        command-line entry point (``pairselect``)
"""

from .bounds import (
    BoundQuery,
    exact_lower_bound,
    growth_table,
    pac_lower_bound,
    seebs_upper_bound,
    seeks_upper_bound,
)
from .core import (
    CyclicPreferenceError,
    EmptySetError,
    GapVector,
    IdenticalItemsError,
    KOutOfRangeError,
    NotStrictOrderError,
    PairSelectError,
    PreferenceInstance,
    Ranking,
    RoundRecord,
    SelectionParams,
    SelectionResult,
    gap_vector,
    ranking_of,
    true_best_k,
)
from .harness import ExperimentConfig, SweepSpec, TrialReport, run_experiment, write_csv
from .ingest import PwgDocument, borda_ranking, parse_pwg, to_preference_instance
from .oracle import (
    ComparisonOracle,
    InstanceSpec,
    MatrixOracle,
    duel_bernoulli_p1,
    duel_gaussian_p2,
    flipped,
    make_empirical,
    make_equal_gap,
    make_mnl,
    make_thurstone,
    make_uniform_gap,
)
from .selection import (
    Buckets,
    DiParams,
    distribute_item,
    elimination_best_select,
    elimination_k_select,
    epsilon_quick_select,
    tournament_k_select,
    tournament_worst_select,
)
from .verify import (
    Verdict,
    best_k_bruteforce,
    is_eps_k_optimal,
    is_exact_best_k,
    validate_gamma,
    validate_sst,
    validate_sti,
)

__version__ = "0.1.0"
