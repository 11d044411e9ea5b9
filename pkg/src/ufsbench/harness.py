"""Experiment orchestration: the (dataset x method x repeat) grid.

Every grid cell derives its own seed from the master seed and the cell
coordinates, so cells can run in any order (or in parallel) and still
produce byte-identical reports.  The per-cell pipeline is strictly
leak-free: splitting first, then imputation and min-max scaling fitted on
the training fold only, then label-blind feature selection on the training
features, and only then the classifier.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import metrics, mlknn, selectors
from .arff import LabelSpec, parse_arff, parse_label_xml
from .dataset import (
    MultiLabelDataset,
    holdout_split,
    impute_missing,
    instantiate_single_label,
    minmax_normalize,
)
from .manifest import fetch_manifest
from .metrics import METRIC_DIRECTIONS
from .rng import derive_seed
from .selectors import SelectorConfig

METRIC_NAMES = tuple(METRIC_DIRECTIONS)

# conventions baked into this implementation, echoed into every report so
# numbers stay auditable
PINNED_CONVENTIONS = {
    "classifier": "ml-knn, leave-one-out neighborhoods, posterior 0.5 tie predicts absent",
    "scaling": "min-max fitted on the training fold; test values clamped to [0, 1]",
    "missing_values": "imputed with the training-fold column mean",
    "split_rng": (
        "splitmix64 Fisher-Yates; cell seed = mix(master, dataset, repeat), "
        "so every method sees identical folds per repeat (paired comparison)"
    ),
    "ranking_tie_rule": "equal scores rank by ascending feature index",
    "rank_table_ties": "tied methods share the mean rank position",
    "ranking_loss_ties": "score ties count as violations",
    "degenerate_instances": "skipped for one_error/ranking_loss and counted; empty/empty jaccard = 1",
    "std": "sample standard deviation (n-1); 0 for a single repeat",
}


class HarnessError(ValueError):
    pass


@dataclass(frozen=True)
class DatasetSource:
    """A dataset file reference in an experiment config."""

    arff: str
    xml: str | None = None
    first: int | None = None
    last: int | None = None
    name: str | None = None

    def load(self) -> MultiLabelDataset:
        text = Path(self.arff).read_text()
        if self.xml is not None:
            spec = parse_label_xml(Path(self.xml).read_text())
        elif self.first is not None:
            spec = LabelSpec.first(self.first)
        elif self.last is not None:
            spec = LabelSpec.last(self.last)
        else:
            raise HarnessError(f"dataset '{self.arff}': no label specification")
        ds = parse_arff(text, spec)
        if self.name:
            ds = MultiLabelDataset(self.name, ds.X, ds.Y, ds.feature_names, ds.label_names)
        return ds


@dataclass(frozen=True)
class ExperimentConfig:
    methods: tuple[SelectorConfig, ...]
    d: tuple[int, ...]
    master_seed: int
    sources: tuple[DatasetSource, ...] = ()
    manifest: str | None = None
    cache_dir: str | None = None
    repeats: int = 10
    train_fraction: float = 0.8
    knn_k: int = 10
    smoothing: float = 1.0
    output_dir: str = "ufsbench-out"

    def __post_init__(self):
        if self.repeats < 1:
            raise HarnessError("repeats must be >= 1")
        if not 0.0 < self.train_fraction < 1.0:
            raise HarnessError("train_fraction must lie strictly between 0 and 1")
        if not self.methods:
            raise HarnessError("at least one selector method is required")
        if not self.d or any(v < 1 for v in self.d):
            raise HarnessError("d entries must be >= 1")


def config_from_json(path: str | Path) -> ExperimentConfig:
    raw = json.loads(Path(path).read_text())
    methods = tuple(
        SelectorConfig(
            method=m["method"],
            graph_k=m.get("graph_k", 5),
            mcfs_clusters=m.get("mcfs_clusters", 5),
            mcfs_cardinality=m.get("mcfs_cardinality"),
            seed=m.get("seed", 0),
            external_path=m.get("external_path"),
        )
        for m in raw["methods"]
    )
    d = raw.get("d")
    d = tuple(d) if isinstance(d, list) else ((int(d),) if d else ())
    sources = tuple(
        DatasetSource(
            arff=s["arff"], xml=s.get("xml"), first=s.get("first"),
            last=s.get("last"), name=s.get("name"),
        )
        for s in raw.get("datasets", [])
    )
    return ExperimentConfig(
        methods=methods,
        d=d,
        master_seed=int(raw["master_seed"]),
        sources=sources,
        manifest=raw.get("manifest"),
        cache_dir=raw.get("cache_dir"),
        repeats=raw.get("repeats", 10),
        train_fraction=raw.get("train_fraction", 0.8),
        knn_k=raw.get("knn_k", 10),
        smoothing=raw.get("smoothing", 1.0),
        output_dir=raw.get("output_dir", "ufsbench-out"),
    )


def default_feature_count(n_features: int) -> int:
    """Fallback when a config leaves d unset: half the features, capped."""
    return min(int(np.ceil(n_features / 2)), 100)


def load_datasets(cfg: ExperimentConfig) -> tuple[list[MultiLabelDataset], list[tuple[str, str]]]:
    datasets: list[MultiLabelDataset] = []
    failures: list[tuple[str, str]] = []
    for src in cfg.sources:
        try:
            datasets.append(src.load())
        except Exception as exc:  # noqa: BLE001 - per-dataset isolation
            failures.append((src.name or src.arff, str(exc)))
    if cfg.manifest:
        fetched = fetch_manifest(cfg.manifest, cache_dir=cfg.cache_dir)
        datasets.extend(fetched.datasets)
        failures.extend(fetched.failures)
    return datasets, failures


def cell_seed(master_seed: int, dataset: str, repeat: int) -> int:
    """The pinned 64-bit mix for one grid cell.

    The method name is deliberately not part of the mix: all selectors see
    the identical train/test folds of a repeat, which keeps cross-method
    comparisons paired and makes an external score file that mirrors an
    internal selector reproduce its results exactly.
    """
    return derive_seed(master_seed, dataset, repeat)


def _ranking_sha(ranking: selectors.FeatureRanking) -> str:
    digest = hashlib.sha256()
    digest.update(ranking.scores.tobytes())
    digest.update(ranking.order.tobytes())
    return digest.hexdigest()


def _config_echo(cfg: ExperimentConfig) -> dict:
    return {
        "methods": [
            {
                "method": m.method, "graph_k": m.graph_k,
                "mcfs_clusters": m.mcfs_clusters,
                "mcfs_cardinality": m.mcfs_cardinality,
                "seed": m.seed, "external_path": m.external_path,
            }
            for m in cfg.methods
        ],
        "d": list(cfg.d),
        "repeats": cfg.repeats,
        "train_fraction": cfg.train_fraction,
        "knn_k": cfg.knn_k,
        "smoothing": cfg.smoothing,
        "master_seed": cfg.master_seed,
        "conventions": dict(PINNED_CONVENTIONS),
    }


def _prepared_folds(ds: MultiLabelDataset, cfg: ExperimentConfig, repeat: int):
    """Split, impute and scale one grid cell; returns folds plus the seed."""
    seed = cell_seed(cfg.master_seed, ds.name, repeat)
    split = holdout_split(ds, cfg.train_fraction, seed)
    train, test = impute_missing(split.train, split.test)
    train, test = minmax_normalize(train, test)
    return train, test, seed


def _resolve_selector(method: SelectorConfig, cfg: ExperimentConfig, n_features: int) -> SelectorConfig:
    # the MCFS path cardinality defaults to the largest requested d so one
    # ranking serves a whole d sweep (top_d prefixes then nest by construction)
    if method.method == "mcfs" and method.mcfs_cardinality is None:
        return replace(method, mcfs_cardinality=min(max(cfg.d), n_features))
    return method


def run_experiment(
    cfg: ExperimentConfig, datasets: list[MultiLabelDataset] | None = None
) -> dict:
    """Run the full grid and return the report as a JSON-ready dict."""
    failures: list[tuple[str, str]] = []
    if datasets is None:
        datasets, failures = load_datasets(cfg)
    if not datasets:
        raise HarnessError("no datasets available for the experiment grid")

    cells = []
    warnings: list[str] = []
    for ds in datasets:
        for method in cfg.methods:
            resolved = _resolve_selector(method, cfg, ds.n_features)
            for repeat in range(cfg.repeats):
                train, test, seed = _prepared_folds(ds, cfg, repeat)
                ranking = selectors.select(train.X, resolved)
                sha = _ranking_sha(ranking)
                for d in cfg.d:
                    d_eff = min(d, ds.n_features)
                    if d_eff != d:
                        note = f"{ds.name}: d={d} clamped to F={ds.n_features}"
                        if note not in warnings:
                            warnings.append(note)
                    cols = selectors.top_d(ranking, d_eff)
                    model = mlknn.fit(
                        train.X[:, cols], train.Y, k=cfg.knn_k, s=cfg.smoothing
                    )
                    labels, scores = mlknn.predict_batch(model, test.X[:, cols])
                    result = metrics.evaluate(labels, scores, test.Y)
                    cells.append(
                        {
                            "dataset": ds.name,
                            "method": method.label(),
                            "d": d,
                            "repeat": repeat,
                            "seed": seed,
                            "ranking_sha256": sha,
                            "metrics": {
                                name: getattr(result, name) for name in METRIC_NAMES
                            },
                            "skipped": {
                                "one_error": result.skipped_one_error,
                                "ranking_loss": result.skipped_ranking_loss,
                            },
                        }
                    )

    report = {
        "config": _config_echo(cfg),
        "datasets": [
            {
                "name": ds.name,
                "instances": ds.n_instances,
                "features": ds.n_features,
                "labels": ds.n_labels,
            }
            for ds in datasets
        ],
        "cells": cells,
        "aggregates": _aggregate(cells),
        "rank_tables": {},
        "warnings": warnings,
        "failures": [list(f) for f in failures],
    }
    report["rank_tables"] = _rank_tables(report, [ds.name for ds in datasets], cfg)
    return report


def _aggregate(cells: list[dict]) -> dict:
    """mean/std per (dataset, method, d, metric); sample std, 0 if one repeat."""
    grouped: dict[tuple, list[dict]] = {}
    for cell in cells:
        grouped.setdefault((cell["dataset"], cell["method"], cell["d"]), []).append(cell)
    out: dict = {}
    for (ds, method, d), group in grouped.items():
        seeds = [c["seed"] for c in sorted(group, key=lambda c: c["repeat"])]
        stats = {}
        for name in METRIC_NAMES:
            vals = np.array([c["metrics"][name] for c in group])
            std = float(vals.std(ddof=1)) if len(vals) > 1 else 0.0
            stats[name] = {"mean": float(vals.mean()), "std": std}
        out.setdefault(ds, {}).setdefault(method, {})[str(d)] = {
            "metrics": stats,
            "seeds": seeds,
        }
    return out


def _rank_tables(report: dict, dataset_names: list[str], cfg: ExperimentConfig) -> dict:
    methods = [m.label() for m in cfg.methods]
    agg = report["aggregates"]
    tables: dict = {}
    for metric in METRIC_NAMES:
        higher = METRIC_DIRECTIONS[metric]
        direction = "higher_better" if higher else "lower_better"
        tables[metric] = {}
        for d in cfg.d:
            table = np.array(
                [
                    [agg[ds][m][str(d)]["metrics"][metric]["mean"] for m in methods]
                    for ds in dataset_names
                ]
            )
            per_ds = {
                ds: metrics.rank_values(row, higher).tolist()
                for ds, row in zip(dataset_names, table)
            }
            tables[metric][str(d)] = {
                "methods": methods,
                "direction": direction,
                "average_rank": metrics.average_rank(table, direction).tolist(),
                "per_dataset_ranks": per_ds,
            }
    return tables


def single_label_study(cfg: ExperimentConfig, ds: MultiLabelDataset) -> dict:
    """Per-label instantiation study on one dataset.

    Runs the identical grid once per label with a majority-vote kNN on the
    selected features, ranks the methods per label, and reports pairwise
    Kendall tau between the per-label rankings plus tau against the
    multi-label (jaccard accuracy) ranking of the same grid.
    """
    if ds.n_labels < 3:
        raise HarnessError("single-label study needs q >= 3 labels")
    methods = [m.label() for m in cfg.methods]

    per_label_acc = np.zeros((ds.n_labels, len(cfg.methods)))
    ml_acc = np.zeros(len(cfg.methods))
    for mi, method in enumerate(cfg.methods):
        resolved = _resolve_selector(method, cfg, ds.n_features)
        label_sums = np.zeros(ds.n_labels)
        ml_sum = 0.0
        n_cells = 0
        for repeat in range(cfg.repeats):
            train, test, _ = _prepared_folds(ds, cfg, repeat)
            ranking = selectors.select(train.X, resolved)
            for d in cfg.d:
                cols = selectors.top_d(ranking, min(d, ds.n_features))
                n_cells += 1
                model = mlknn.fit(train.X[:, cols], train.Y, k=cfg.knn_k, s=cfg.smoothing)
                labels, _ = mlknn.predict_batch(model, test.X[:, cols])
                ml_sum += metrics.ml_accuracy(labels, test.Y)
                for label in range(ds.n_labels):
                    y_train = instantiate_single_label(train, label).y
                    y_test = instantiate_single_label(test, label).y
                    preds = mlknn.majority_knn_predict(
                        train.X[:, cols], y_train, test.X[:, cols], k=cfg.knn_k
                    )
                    label_sums[label] += metrics.single_label_accuracy(preds, y_test)
        per_label_acc[:, mi] = label_sums / n_cells
        ml_acc[mi] = ml_sum / n_cells

    label_ranks = np.stack(
        [metrics.rank_values(row, higher_better=True) for row in per_label_acc]
    )
    ml_rank = metrics.rank_values(ml_acc, higher_better=True)

    q = ds.n_labels
    pairwise = np.ones((q, q))
    for i in range(q):
        for j in range(i + 1, q):
            # tau on negated ranks == tau on the underlying "better" order
            tau = metrics.kendall_tau(-label_ranks[i], -label_ranks[j])
            pairwise[i, j] = pairwise[j, i] = tau
    tau_vs_ml = [
        metrics.kendall_tau(-label_ranks[i], -ml_rank) for i in range(q)
    ]
    off_diag = pairwise[~np.eye(q, dtype=bool)]

    return {
        "dataset": ds.name,
        "methods": methods,
        "config": _config_echo(cfg),
        "labels": list(ds.label_names),
        "per_label_accuracy": {
            ds.label_names[i]: dict(zip(methods, per_label_acc[i].tolist()))
            for i in range(q)
        },
        "per_label_ranks": {
            ds.label_names[i]: label_ranks[i].tolist() for i in range(q)
        },
        "multilabel_accuracy": dict(zip(methods, ml_acc.tolist())),
        "multilabel_rank": ml_rank.tolist(),
        "pairwise_tau": pairwise.tolist(),
        "min_pairwise_tau": float(off_diag.min()) if q > 1 else 1.0,
        "tau_vs_multilabel": dict(zip(ds.label_names, tau_vs_ml)),
    }
