"""PrefLib pairwise-graph (.pwg) ingestion and Borda ground truth.

The legacy PrefLib pairwise format is line-oriented:

    <candidate count>
    <candidate number>, <candidate name>          (one line per candidate)
    <voter count>, <vote total>, <unique orders>  (totals line)
    <count>, <i>, <j>                             (one record per observed
                                                   ordered pair: count votes
                                                   prefer candidate i over j)

Candidate numbers are 1-based in files and remapped to 0-based indices here;
labels are kept for display only. Vote-count matrices convert to preference
instances via ``p[i, j] = N_ij / (N_ij + N_ji)``; election data generally
fails the stochastic transitivity conditions, so Borda scores provide the
ground-truth ranking for such instances.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

import numpy as np

from .core import PairSelectError, PreferenceInstance, Ranking


class IngestError(PairSelectError):
    """Base class for parse and conversion failures."""


class MalformedLineError(IngestError):
    def __init__(self, line_no: int, reason: str) -> None:
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no


class NonIntegerCountError(IngestError):
    def __init__(self, line_no: int, token: str) -> None:
        super().__init__(f"line {line_no}: count {token!r} is not a non-negative integer")
        self.line_no = line_no


class IndexOutOfRangeError(IngestError):
    def __init__(self, line_no: int, index: int, n: int) -> None:
        super().__init__(f"line {line_no}: candidate index {index} outside 1..{n}")
        self.line_no = line_no


class MissingPairError(IngestError):
    """A pair with zero recorded votes under missing_policy='error'."""


@dataclass(frozen=True)
class PwgDocument:
    """Parsed pairwise-vote file: labels plus ordered-pair vote counts (0-based)."""

    n: int
    labels: tuple[str, ...]
    counts: dict[tuple[int, int], int]
    totals: tuple[int, ...] = field(default=())


def _int_token(token: str, line_no: int, what: str) -> int:
    text = token.strip()
    if not text or not (text.isdigit() or (text[0] in "+-" and text[1:].isdigit())):
        raise MalformedLineError(line_no, f"{what} {token!r} is not an integer")
    return int(text)


def parse_pwg(source) -> PwgDocument:
    """Parse a .pwg document from a path, text, bytes, or file object."""
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    elif hasattr(source, "read"):
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    else:
        raise TypeError(f"cannot parse pwg from {type(source)!r}")

    lines = text.splitlines()
    pos = 0

    def next_line() -> tuple[int, str]:
        nonlocal pos
        while pos < len(lines):
            pos += 1
            stripped = lines[pos - 1].strip()
            if stripped:
                return pos, stripped
        raise MalformedLineError(len(lines) or 1, "unexpected end of file")

    line_no, head = next_line()
    n = _int_token(head, line_no, "candidate count")
    if n < 1:
        raise MalformedLineError(line_no, f"candidate count must be positive, got {n}")

    labels = [""] * n
    for _ in range(n):
        line_no, line = next_line()
        if "," not in line:
            raise MalformedLineError(line_no, "candidate line needs '<number>, <name>'")
        num_tok, label = line.split(",", 1)
        idx = _int_token(num_tok, line_no, "candidate number")
        if not 1 <= idx <= n:
            raise IndexOutOfRangeError(line_no, idx, n)
        labels[idx - 1] = label.strip()

    line_no, line = next_line()
    totals = tuple(_int_token(tok, line_no, "totals entry") for tok in line.split(","))

    counts: dict[tuple[int, int], int] = {}
    while True:
        try:
            line_no, line = next_line()
        except MalformedLineError:
            break
        parts = line.split(",")
        if len(parts) != 3:
            raise MalformedLineError(line_no, f"expected 'count, i, j', got {line!r}")
        count_tok = parts[0].strip()
        if not count_tok.isdigit():
            raise NonIntegerCountError(line_no, count_tok)
        count = int(count_tok)
        i = _int_token(parts[1], line_no, "candidate index")
        j = _int_token(parts[2], line_no, "candidate index")
        for idx in (i, j):
            if not 1 <= idx <= n:
                raise IndexOutOfRangeError(line_no, idx, n)
        if i == j:
            raise MalformedLineError(line_no, f"record compares candidate {i} with itself")
        key = (i - 1, j - 1)
        counts[key] = counts.get(key, 0) + count

    return PwgDocument(n=n, labels=tuple(labels), counts=counts, totals=totals)


def serialize_pwg(doc: PwgDocument) -> str:
    """Canonical text form; parse(serialize(doc)) reproduces the document."""
    out = io.StringIO()
    out.write(f"{doc.n}\n")
    for idx, label in enumerate(doc.labels, start=1):
        out.write(f"{idx}, {label}\n")
    totals = doc.totals if doc.totals else (0, 0, 0)
    out.write(", ".join(str(t) for t in totals) + "\n")
    for (i, j), count in sorted(doc.counts.items()):
        out.write(f"{count}, {i + 1}, {j + 1}\n")
    return out.getvalue()


def to_preference_instance(
    doc: PwgDocument, missing_policy: str = "error"
) -> PreferenceInstance:
    """Convert vote counts to win probabilities ``N_ij / (N_ij + N_ji)``.

    Pairs with zero total votes are governed by ``missing_policy``:
    ``"error"`` raises, ``"half"`` sets the pair to 1/2 (the instance is then
    not strict-order). The lower triangle is filled with exact complements so
    antisymmetry holds to the last bit.
    """
    if missing_policy not in ("error", "half"):
        raise ValueError(f"missing_policy must be 'error' or 'half', got {missing_policy!r}")
    n = doc.n
    p = np.full((n, n), 0.5, dtype=np.float64)
    for i in range(n):
        for j in range(i + 1, n):
            n_ij = doc.counts.get((i, j), 0)
            n_ji = doc.counts.get((j, i), 0)
            total = n_ij + n_ji
            if total == 0:
                if missing_policy == "error":
                    raise MissingPairError(
                        f"no votes recorded between candidates {i} and {j}"
                    )
                continue
            p[i, j] = n_ij / total
            p[j, i] = 1.0 - p[i, j]
    return PreferenceInstance(p)


def borda_ranking(instance: PreferenceInstance) -> tuple[Ranking, np.ndarray]:
    """Borda scores ``mean_j(p[i, j])`` over opponents, plus the induced ranking.

    Ranking is by descending score with ties broken by ascending item index,
    giving a deterministic ground truth for instances without a strict order.
    """
    if instance.n < 2:
        raise ValueError("Borda scores need at least two items")
    scores = (instance.p.sum(axis=1) - 0.5) / (instance.n - 1)
    order = np.argsort(-scores, kind="stable")
    scores.setflags(write=False)
    return Ranking(tuple(int(x) for x in order)), scores


def instance_to_json(instance: PreferenceInstance, labels=None) -> str:
    """Normalized JSON form {n, labels, p} of an instance."""
    doc = {
        "n": instance.n,
        "labels": list(labels) if labels is not None else None,
        "p": [[float(x) for x in row] for row in instance.p],
    }
    return json.dumps(doc)


def instance_from_json(text: str) -> PreferenceInstance:
    data = json.loads(text)
    if not isinstance(data, dict) or "p" not in data:
        raise IngestError("normalized instance JSON must be an object with a 'p' matrix")
    return PreferenceInstance(data["p"])


def load_instance_file(path: str, missing_policy: str = "error") -> PreferenceInstance:
    """Load a preference instance from a .pwg file or a normalized JSON file."""
    with open(path, "rb") as handle:
        raw = handle.read()
    if path.endswith(".json"):
        return instance_from_json(raw.decode("utf-8"))
    doc = parse_pwg(raw)
    return to_preference_instance(doc, missing_policy=missing_policy)
