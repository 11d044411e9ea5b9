"""Multi-label k-nearest-neighbor classifier.

For every label, the model keeps a smoothed prior and the distribution of
"how many of an instance's k neighbors carry this label", separately for
instances that do and do not carry it.  Prediction combines both into a
per-label posterior; the binary decision thresholds the posterior at 0.5
(an exact 0.5 predicts absent).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import numerics


class MLkNNError(ValueError):
    pass


@dataclass(frozen=True)
class TrainedMLkNN:
    train_X: np.ndarray
    train_Y: np.ndarray
    k: int
    s: float
    prior: np.ndarray      # (q,) P(label present)
    cond_true: np.ndarray  # (q, k+1) P(j neighbors carry label | present)
    cond_false: np.ndarray # (q, k+1) P(j neighbors carry label | absent)


@dataclass(frozen=True)
class Prediction:
    label_set: np.ndarray  # (q,) 0/1 decisions
    scores: np.ndarray     # (q,) posteriors in (0, 1)


def fit(train_X: np.ndarray, train_Y: np.ndarray, k: int, s: float = 1.0) -> TrainedMLkNN:
    """Estimate priors and neighbor-count likelihoods from the training fold.

    Neighborhoods are leave-one-out within the training set (an instance is
    never its own neighbor); counts are Laplace-smoothed by s.
    """
    X = np.asarray(train_X, dtype=np.float64)
    Y = np.asarray(train_Y, dtype=np.int8)
    p, q = Y.shape
    if X.shape[0] != p:
        raise MLkNNError("X and Y row counts differ")
    if not 1 <= k < p:
        raise MLkNNError(f"k={k} must satisfy 1 <= k < {p}")
    if s <= 0:
        raise MLkNNError("smoothing s must be positive")

    prior = (s + Y.sum(axis=0)) / (2.0 * s + p)

    graph = numerics.knn_search(X, k=k)
    neighbor_counts = Y[graph.indices].sum(axis=1)  # (p, q), values 0..k

    cond_true = np.empty((q, k + 1))
    cond_false = np.empty((q, k + 1))
    for label in range(q):
        present = Y[:, label] == 1
        c1 = np.bincount(neighbor_counts[present, label], minlength=k + 1)
        c0 = np.bincount(neighbor_counts[~present, label], minlength=k + 1)
        cond_true[label] = (s + c1) / (s * (k + 1) + c1.sum())
        cond_false[label] = (s + c0) / (s * (k + 1) + c0.sum())

    model = TrainedMLkNN(
        train_X=X, train_Y=Y, k=k, s=float(s),
        prior=prior, cond_true=cond_true, cond_false=cond_false,
    )
    model.prior.setflags(write=False)
    model.cond_true.setflags(write=False)
    model.cond_false.setflags(write=False)
    return model


def predict_batch(model: TrainedMLkNN, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Label decisions and posterior scores for a batch of instances."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.train_X.shape[1]:
        raise MLkNNError("query feature arity does not match the model")
    idx, _ = numerics.knn_indices(X, model.train_X, model.k)
    counts = model.train_Y[idx].sum(axis=1)  # (m, q)
    cols = np.arange(model.train_Y.shape[1])
    like_true = model.cond_true[cols[None, :], counts]
    like_false = model.cond_false[cols[None, :], counts]
    p1 = model.prior[None, :] * like_true
    p0 = (1.0 - model.prior)[None, :] * like_false
    scores = p1 / (p1 + p0)
    labels = (scores > 0.5).astype(np.int8)
    return labels, scores


def predict(model: TrainedMLkNN, x: np.ndarray) -> Prediction:
    """Single-instance prediction; see predict_batch."""
    labels, scores = predict_batch(model, np.asarray(x, dtype=np.float64)[None, :])
    return Prediction(label_set=labels[0], scores=scores[0])


def majority_knn_predict(
    train_X: np.ndarray, train_y: np.ndarray, test_X: np.ndarray, k: int
) -> np.ndarray:
    """Plain majority-vote kNN for single-label class vectors.

    Vote ties resolve toward the smaller class value.
    """
    train_y = np.asarray(train_y, dtype=np.int64)
    if not 1 <= k <= train_X.shape[0]:
        raise MLkNNError(f"k={k} out of range for {train_X.shape[0]} training rows")
    idx, _ = numerics.knn_indices(np.asarray(test_X, dtype=np.float64), train_X, k)
    votes = train_y[idx]  # (m, k)
    classes = np.unique(train_y)
    tallies = np.stack([(votes == c).sum(axis=1) for c in classes], axis=1)
    return classes[np.argmax(tallies, axis=1)]


MODEL_FORMAT_VERSION = 1


def to_json(model: TrainedMLkNN) -> str:
    """Versioned JSON dump of the learned tables (for golden tests)."""
    payload = {
        "format_version": MODEL_FORMAT_VERSION,
        "k": model.k,
        "s": model.s,
        "prior": model.prior.tolist(),
        "cond_true": model.cond_true.tolist(),
        "cond_false": model.cond_false.tolist(),
        "train_X": model.train_X.tolist(),
        "train_Y": model.train_Y.tolist(),
    }
    return json.dumps(payload, sort_keys=True)


def from_json(text: str) -> TrainedMLkNN:
    payload = json.loads(text)
    version = payload.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise MLkNNError(f"unsupported model format version {version!r}")
    return TrainedMLkNN(
        train_X=np.array(payload["train_X"], dtype=np.float64),
        train_Y=np.array(payload["train_Y"], dtype=np.int8),
        k=int(payload["k"]),
        s=float(payload["s"]),
        prior=np.array(payload["prior"]),
        cond_true=np.array(payload["cond_true"]),
        cond_false=np.array(payload["cond_false"]),
    )
