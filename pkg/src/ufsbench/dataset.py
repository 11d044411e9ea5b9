"""Multi-label dataset container and fold-level transformations.

A dataset couples a dense real feature matrix X (p x F) with a binary label
matrix Y (p x q).  All containers are frozen after construction; the
transformations below (splitting, normalization, imputation, single-label
projection) return new objects and never mutate their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .rng import SplitMix64


class DatasetError(ValueError):
    """Raised when data violates the container invariants."""


@dataclass(frozen=True)
class MultiLabelDataset:
    name: str
    X: np.ndarray
    Y: np.ndarray
    feature_names: tuple[str, ...]
    label_names: tuple[str, ...]

    def __post_init__(self):
        X = np.ascontiguousarray(self.X, dtype=np.float64)
        Y = np.ascontiguousarray(self.Y, dtype=np.int8)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "label_names", tuple(self.label_names))
        if X.ndim != 2 or Y.ndim != 2:
            raise DatasetError("X and Y must be 2-d")
        p, n_feat = X.shape
        if Y.shape[0] != p:
            raise DatasetError(f"X has {p} rows but Y has {Y.shape[0]}")
        if p < 1 or n_feat < 1:
            raise DatasetError("need at least one instance and one feature")
        if Y.shape[1] < 2:
            raise DatasetError(f"need at least two labels, got {Y.shape[1]}")
        if len(self.feature_names) != n_feat:
            raise DatasetError("feature_names length does not match X")
        if len(self.label_names) != Y.shape[1]:
            raise DatasetError("label_names length does not match Y")
        if not np.isin(Y, (0, 1)).all():
            raise DatasetError("Y entries must be exactly 0 or 1")
        # NaN marks imputable missing values (filled from training-fold means)
        if np.isinf(X).any():
            raise DatasetError("X contains infinite entries")
        X.setflags(write=False)
        Y.setflags(write=False)

    @property
    def n_instances(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    @property
    def n_labels(self) -> int:
        return self.Y.shape[1]

    def take_rows(self, rows: np.ndarray, suffix: str) -> "MultiLabelDataset":
        return MultiLabelDataset(
            name=f"{self.name}{suffix}",
            X=self.X[rows],
            Y=self.Y[rows],
            feature_names=self.feature_names,
            label_names=self.label_names,
        )

    def restrict_features(self, cols) -> "MultiLabelDataset":
        cols = np.asarray(cols, dtype=np.intp)
        return MultiLabelDataset(
            name=self.name,
            X=self.X[:, cols],
            Y=self.Y,
            feature_names=tuple(self.feature_names[j] for j in cols),
            label_names=self.label_names,
        )


@dataclass(frozen=True)
class SplitPair:
    train: MultiLabelDataset
    test: MultiLabelDataset
    seed: int
    train_rows: np.ndarray = field(repr=False)
    test_rows: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class SingleLabelDataset:
    X: np.ndarray
    y: np.ndarray
    source_label: int


def holdout_split(d: MultiLabelDataset, train_fraction: float, seed: int) -> SplitPair:
    """Seeded random partition into train/test row sets.

    Draws floor(train_fraction * p) training rows by a Fisher-Yates shuffle
    on the splitmix64 stream, so the same (dataset, seed, fraction) always
    produces the identical split in any implementation of that stream.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must lie strictly between 0 and 1")
    p = d.n_instances
    if p < 5:
        raise DatasetError("dataset too small to split (need p >= 5)")
    n_train = int(np.floor(train_fraction * p))
    if n_train < 1 or n_train >= p:
        raise DatasetError("split leaves an empty fold")
    perm = np.arange(p, dtype=np.int64)
    SplitMix64(seed).shuffle(perm)
    train_rows = np.sort(perm[:n_train])
    test_rows = np.sort(perm[n_train:])
    return SplitPair(
        train=d.take_rows(train_rows, "/train"),
        test=d.take_rows(test_rows, "/test"),
        seed=seed,
        train_rows=train_rows,
        test_rows=test_rows,
    )


def impute_missing(
    train: MultiLabelDataset, test: MultiLabelDataset
) -> tuple[MultiLabelDataset, MultiLabelDataset]:
    """Replace NaN feature entries with the training-fold column mean.

    Train statistics only: the test fold never influences the fill values.
    Columns that are all-NaN on the training fold fall back to 0.
    """
    means = np.nanmean(
        np.where(np.isfinite(train.X), train.X, np.nan), axis=0
    )
    means = np.where(np.isfinite(means), means, 0.0)

    def fill(ds: MultiLabelDataset) -> MultiLabelDataset:
        if np.isfinite(ds.X).all():
            return ds
        X = np.where(np.isfinite(ds.X), ds.X, means)
        return MultiLabelDataset(ds.name, X, ds.Y, ds.feature_names, ds.label_names)

    return fill(train), fill(test)


def minmax_normalize(
    train: MultiLabelDataset, test: MultiLabelDataset
) -> tuple[MultiLabelDataset, MultiLabelDataset]:
    """Scale every feature to [0, 1] using training-fold min/max only.

    Constant training columns map to 0 everywhere; test values outside the
    training range clamp to [0, 1].
    """
    if train.n_features != test.n_features:
        raise DatasetError("train/test feature arity mismatch")
    lo = train.X.min(axis=0)
    hi = train.X.max(axis=0)
    span = hi - lo
    constant = span <= 0.0
    safe_span = np.where(constant, 1.0, span)

    def scale(ds: MultiLabelDataset, clamp: bool) -> MultiLabelDataset:
        X = (ds.X - lo) / safe_span
        X[:, constant] = 0.0
        if clamp:
            np.clip(X, 0.0, 1.0, out=X)
        return MultiLabelDataset(ds.name, X, ds.Y, ds.feature_names, ds.label_names)

    return scale(train, clamp=False), scale(test, clamp=True)


def instantiate_single_label(d: MultiLabelDataset, label: int) -> SingleLabelDataset:
    """Project the dataset onto one label column, keeping X unchanged."""
    if not 0 <= label < d.n_labels:
        raise IndexError(f"label index {label} out of range for q={d.n_labels}")
    return SingleLabelDataset(
        X=d.X, y=d.Y[:, label].astype(np.int64), source_label=label
    )
