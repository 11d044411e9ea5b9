"""Unsupervised feature scoring methods behind one dispatch surface.

Every selector sees only the training feature matrix; labels are never part
of any signature here.  Scores are higher-is-better and the induced order
breaks ties toward the lower feature index, so rankings are deterministic
and comparable across implementations.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import numerics
from .rng import SplitMix64

# finite stand-in for "ranked last": keeps the all-scores-finite contract
# while sorting below anything a real criterion can produce
WORST_SCORE = -np.finfo(np.float64).max


class SelectorError(ValueError):
    pass


@dataclass(frozen=True)
class FeatureRanking:
    scores: np.ndarray
    order: np.ndarray
    method: str

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float64)
        order = np.asarray(self.order, dtype=np.int64)
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "order", order)
        if not np.isfinite(scores).all():
            raise SelectorError("ranking scores must be finite")
        if sorted(order.tolist()) != list(range(len(scores))):
            raise SelectorError("order must be a permutation of feature indices")
        scores.setflags(write=False)
        order.setflags(write=False)


def _rank(scores: np.ndarray, method: str) -> FeatureRanking:
    scores = np.asarray(scores, dtype=np.float64)
    idx = np.arange(len(scores))
    order = np.lexsort((idx, -scores))
    return FeatureRanking(scores=scores, order=order, method=method)


@dataclass(frozen=True)
class SelectorConfig:
    method: str
    graph_k: int = 5
    mcfs_clusters: int = 5
    mcfs_cardinality: int | None = None  # None: resolved to the requested d
    seed: int = 0
    external_path: str | None = None

    def label(self) -> str:
        return self.method


METHODS = ("variance", "laplacian_score", "mcfs", "random", "external")


def select(train_X: np.ndarray, cfg: SelectorConfig) -> FeatureRanking:
    """Score features of the training matrix according to cfg.method."""
    X = np.asarray(train_X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise SelectorError("need a 2-d matrix with at least 2 rows")
    if cfg.method == "variance":
        return variance_scores(X)
    if cfg.method == "laplacian_score":
        return laplacian_score(X, graph_k=cfg.graph_k)
    if cfg.method == "mcfs":
        cardinality = cfg.mcfs_cardinality or X.shape[1]
        return mcfs(X, graph_k=cfg.graph_k, clusters=cfg.mcfs_clusters,
                    cardinality=cardinality)
    if cfg.method == "random":
        return random_scores(X.shape[1], seed=cfg.seed)
    if cfg.method == "external":
        if cfg.external_path is None:
            raise SelectorError("external method requires external_path")
        return external_scores(cfg.external_path, n_features=X.shape[1])
    raise SelectorError(f"unknown selector method '{cfg.method}'")


def variance_scores(X: np.ndarray) -> FeatureRanking:
    """Rank features by their (population) variance."""
    return _rank(np.var(X, axis=0), "variance")


def random_scores(n_features: int, seed: int) -> FeatureRanking:
    """Seeded uniform scores; a reproducible no-information baseline."""
    stream = SplitMix64(seed)
    scores = np.array([stream.next_u64() / 2.0**64 for _ in range(n_features)])
    return _rank(scores, "random")


def external_scores(path: str | Path, n_features: int) -> FeatureRanking:
    """Load per-feature scores from a text file, one real per line."""
    try:
        lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    except OSError as exc:
        raise SelectorError(f"cannot read external scores: {exc}") from None
    if len(lines) != n_features:
        raise SelectorError(
            f"external file has {len(lines)} scores, dataset has {n_features} features"
        )
    try:
        scores = np.array([float(ln) for ln in lines])
    except ValueError as exc:
        raise SelectorError(f"bad score value in external file: {exc}") from None
    if not np.isfinite(scores).all():
        raise SelectorError("external scores must be finite")
    return _rank(scores, "external")


def laplacian_score(X: np.ndarray, graph_k: int = 5) -> FeatureRanking:
    """Graph-smoothness criterion: features varying little across neighbor
    edges score well.

    Builds a symmetric kNN graph with heat-kernel weights
    exp(-d^2 / sigma^2), sigma^2 being the mean squared neighbor distance,
    then evaluates   (f~' L f~) / (f~' D f~)   per feature, where f~ is the
    degree-weighted de-meaned feature column.  Smaller is better, so the
    returned score is its negation; constant features rank last.
    """
    X = np.asarray(X, dtype=np.float64)
    graph = numerics.knn_search(X, k=graph_k)
    sigma2 = graph.sq_dists.mean()
    if sigma2 > np.finfo(float).tiny:
        edge_w = np.exp(-graph.sq_dists / sigma2)
    else:
        edge_w = np.ones_like(graph.sq_dists)
    W = graph.adjacency(edge_w)
    L, D = numerics.graph_laplacian(W, "unnormalized")
    deg = np.diag(D)
    total = deg.sum()
    centered = X - (deg @ X) / total
    num = np.einsum("ij,ij->j", centered, L @ centered)
    den = np.einsum("ij,ij->j", centered * deg[:, None], centered)
    degenerate = den <= 1e-12
    safe_den = np.where(degenerate, 1.0, den)
    scores = np.where(degenerate, WORST_SCORE, -(num / safe_den))
    return _rank(scores, "laplacian_score")


def mcfs(
    X: np.ndarray, graph_k: int = 5, clusters: int = 5, cardinality: int | None = None
) -> FeatureRanking:
    """Multi-cluster selection: spectral embedding + per-direction sparse fits.

    A binary symmetric kNN graph yields the normalized Laplacian, whose
    eigenvectors 2..clusters+1 act as soft cluster indicators.  Each
    indicator is regressed on the features via the lasso-LARS path limited
    to ``cardinality`` active features; a feature's score is the largest
    absolute coefficient it attains across indicators (0 if never active).
    """
    X = np.asarray(X, dtype=np.float64)
    n, n_feat = X.shape
    if clusters < 2:
        raise SelectorError("mcfs needs at least 2 clusters")
    if clusters + 1 > n:
        raise SelectorError(f"clusters+1={clusters + 1} exceeds {n} rows")
    if cardinality is None:
        cardinality = n_feat
    graph = numerics.knn_search(X, k=graph_k)
    W = graph.adjacency()
    L_norm, _ = numerics.graph_laplacian(W, "normalized")
    pairs = numerics.eigh_smallest(L_norm, clusters + 1)
    scores = np.zeros(n_feat)
    for col in range(1, clusters + 1):  # skip the trivial smallest eigenvector
        coefs = numerics.lars_path(X, pairs.vectors[:, col], max_active=cardinality)
        for j, value in coefs:
            scores[j] = max(scores[j], abs(value))
    return _rank(scores, "mcfs")


def top_d(ranking: FeatureRanking, d: int) -> np.ndarray:
    """The d best-ranked feature indices, in rank order."""
    n_feat = len(ranking.order)
    if not 1 <= d <= n_feat:
        raise SelectorError(f"d={d} out of range for {n_feat} features")
    return ranking.order[:d].copy()
