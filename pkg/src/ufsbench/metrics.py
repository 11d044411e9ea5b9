"""Multi-label evaluation measures and cross-dataset rank aggregation.

Conventions (surfaced in every report):
- one_error / ranking_loss skip instances on which their defining ratio is
  undefined (empty true or false label set); skips are counted and reported.
- ranking_loss counts score ties as violations (the comparison is <=).
- ml_accuracy scores the 0/0 Jaccard case (both sets empty) as 1.
- Rank ties share the mean position by default; the 'min' policy gives every
  tied method the best position, which is how comparison tables are often
  printed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class MetricError(ValueError):
    pass


class MetricUndefinedError(MetricError):
    """Every instance was skipped, so the measure has no value."""


def _check_binary_pair(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 2:
        raise MetricError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a.astype(bool), b.astype(bool)


def hamming_loss(preds: np.ndarray, truth: np.ndarray) -> float:
    """Fraction of wrong per-label decisions over all p*q assignments."""
    P, T = _check_binary_pair(preds, truth)
    return float((P != T).mean())


def ml_accuracy(preds: np.ndarray, truth: np.ndarray) -> float:
    """Mean Jaccard similarity between predicted and true label sets."""
    P, T = _check_binary_pair(preds, truth)
    inter = (P & T).sum(axis=1).astype(np.float64)
    union = (P | T).sum(axis=1).astype(np.float64)
    empty = union == 0
    return float(np.where(empty, 1.0, inter / np.where(empty, 1.0, union)).mean())


def one_error(scores: np.ndarray, truth: np.ndarray) -> tuple[float, int]:
    """Fraction of instances whose top-scored label is not a true label.

    Instances with an empty true set are skipped; returns (value, skipped).
    Score ties resolve toward the lower label index.
    """
    scores = np.asarray(scores, dtype=np.float64)
    T = np.asarray(truth).astype(bool)
    if scores.shape != T.shape or scores.ndim != 2:
        raise MetricError(f"shape mismatch: {scores.shape} vs {T.shape}")
    keep = T.any(axis=1)
    skipped = int((~keep).sum())
    if not keep.any():
        raise MetricUndefinedError("one_error undefined: every instance skipped")
    top = np.argmax(scores[keep], axis=1)  # first max = lowest index on ties
    hits = T[keep, :][np.arange(top.size), top]
    return float(1.0 - hits.mean()), skipped


def ranking_loss(scores: np.ndarray, truth: np.ndarray) -> tuple[float, int]:
    """Mean fraction of (true, false) label pairs ordered wrongly by score.

    A pair counts as a violation when the true label's score is <= the
    false label's score (ties violate).  Instances with an empty true or
    false set are skipped; returns (value, skipped).
    """
    scores = np.asarray(scores, dtype=np.float64)
    T = np.asarray(truth).astype(bool)
    if scores.shape != T.shape or scores.ndim != 2:
        raise MetricError(f"shape mismatch: {scores.shape} vs {T.shape}")
    have_true = T.any(axis=1)
    have_false = (~T).any(axis=1)
    keep = have_true & have_false
    skipped = int((~keep).sum())
    if not keep.any():
        raise MetricUndefinedError("ranking_loss undefined: every instance skipped")
    total = 0.0
    for i in np.flatnonzero(keep):
        s_true = scores[i, T[i]]
        s_false = scores[i, ~T[i]]
        violations = (s_true[:, None] <= s_false[None, :]).sum()
        total += violations / (s_true.size * s_false.size)
    return float(total / keep.sum()), skipped


@dataclass(frozen=True)
class EvaluationResult:
    hamming_loss: float
    ranking_loss: float
    one_error: float
    ml_accuracy: float
    skipped_one_error: int
    skipped_ranking_loss: int


# metric name -> whether larger values are better
METRIC_DIRECTIONS = {
    "hamming_loss": False,
    "ranking_loss": False,
    "one_error": False,
    "ml_accuracy": True,
}


def evaluate(preds: np.ndarray, scores: np.ndarray, truth: np.ndarray) -> EvaluationResult:
    """All four measures for one prediction batch."""
    oe, oe_skip = one_error(scores, truth)
    rl, rl_skip = ranking_loss(scores, truth)
    return EvaluationResult(
        hamming_loss=hamming_loss(preds, truth),
        ranking_loss=rl,
        one_error=oe,
        ml_accuracy=ml_accuracy(preds, truth),
        skipped_one_error=oe_skip,
        skipped_ranking_loss=rl_skip,
    )


def single_label_accuracy(preds: np.ndarray, truth: np.ndarray) -> float:
    """Exact-match fraction for single-label class vectors."""
    preds = np.asarray(preds)
    truth = np.asarray(truth)
    if preds.shape != truth.shape or preds.ndim != 1:
        raise MetricError(f"shape mismatch: {preds.shape} vs {truth.shape}")
    if preds.size == 0:
        raise MetricError("empty prediction vector")
    return float((preds == truth).mean())


def rank_values(values: np.ndarray, higher_better: bool, ties: str = "average") -> np.ndarray:
    """Rank one row of method results, 1 = best.

    ties='average' shares the mean of the tied positions; ties='min' gives
    every tied entry the best tied position (competition ranking).
    """
    values = np.asarray(values, dtype=np.float64)
    if np.isnan(values).any():
        raise MetricError("missing cells cannot be ranked")
    key = -values if higher_better else values
    order = np.argsort(key, kind="stable")
    ranks = np.empty(len(values))
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and key[order[j + 1]] == key[order[i]]:
            j += 1
        if ties == "average":
            shared = (i + j) / 2.0 + 1.0
        elif ties == "min":
            shared = i + 1.0
        else:
            raise MetricError(f"unknown tie policy '{ties}'")
        for m in range(i, j + 1):
            ranks[order[m]] = shared
        i = j + 1
    return ranks


def average_rank(
    table: np.ndarray, direction: str, ties: str = "average"
) -> np.ndarray:
    """Per-method mean rank over datasets (rows = datasets, cols = methods)."""
    table = np.asarray(table, dtype=np.float64)
    if table.ndim != 2 or table.size == 0:
        raise MetricError("rank table must be 2-d and non-empty")
    if direction not in ("lower_better", "higher_better"):
        raise MetricError(f"unknown direction '{direction}'")
    higher = direction == "higher_better"
    ranks = np.stack([rank_values(row, higher, ties) for row in table])
    return ranks.mean(axis=0)


def kendall_tau(a: np.ndarray, b: np.ndarray) -> float:
    """Kendall tau-b between two rank (or score) vectors.

    Identical vectors return exactly 1.0 even when fully tied; vectors with
    no untied pair in either argument return 0.0.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1 or a.size < 2:
        raise MetricError("need two equal-length vectors of size >= 2")
    if np.array_equal(a, b):
        return 1.0
    concordant = discordant = ties_a = ties_b = 0
    n = a.size
    for i in range(n - 1):
        da = a[i] - a[i + 1 :]
        db = b[i] - b[i + 1 :]
        prod = da * db
        concordant += int((prod > 0).sum())
        discordant += int((prod < 0).sum())
        ties_a += int((da == 0).sum())
        ties_b += int((db == 0).sum())
    n0 = n * (n - 1) // 2
    denom = np.sqrt(float(n0 - ties_a) * float(n0 - ties_b))
    if denom == 0:
        return 0.0
    return float((concordant - discordant) / denom)
