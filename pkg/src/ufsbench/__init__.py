"""ufsbench: benchmark unsupervised feature selection methods by how well
an ML-kNN classifier predicts multi-label targets from their selected
features."""

__version__ = "0.1.0"

from .arff import LabelSpec, parse_arff, parse_label_xml, serialize_arff
from .dataset import (
    MultiLabelDataset,
    SingleLabelDataset,
    SplitPair,
    holdout_split,
    impute_missing,
    instantiate_single_label,
    minmax_normalize,
)
from .harness import (
    DatasetSource,
    ExperimentConfig,
    config_from_json,
    run_experiment,
    single_label_study,
)
from .manifest import fetch_manifest
from .metrics import (
    EvaluationResult,
    average_rank,
    evaluate,
    hamming_loss,
    kendall_tau,
    ml_accuracy,
    one_error,
    ranking_loss,
    single_label_accuracy,
)
from .mlknn import TrainedMLkNN, fit, predict, predict_batch
from .report import emit_report
from .selectors import FeatureRanking, SelectorConfig, select, top_d

__all__ = [
    "LabelSpec", "parse_arff", "parse_label_xml", "serialize_arff",
    "MultiLabelDataset", "SingleLabelDataset", "SplitPair",
    "holdout_split", "impute_missing", "instantiate_single_label",
    "minmax_normalize",
    "DatasetSource", "ExperimentConfig", "config_from_json",
    "run_experiment", "single_label_study",
    "fetch_manifest",
    "EvaluationResult", "average_rank", "evaluate", "hamming_loss",
    "kendall_tau", "ml_accuracy", "one_error", "ranking_loss",
    "single_label_accuracy",
    "TrainedMLkNN", "fit", "predict", "predict_batch",
    "FeatureRanking", "SelectorConfig", "select", "top_d",
    "emit_report",
]
