import json

import numpy as np
import pytest

from ufsbench.harness import run_experiment
from ufsbench.report import (
    ReportError,
    emit_report,
    report_csv,
    report_json,
    report_markdown,
)
from ufsbench.selectors import SelectorConfig

from conftest import random_dataset
from test_harness import small_config


@pytest.fixture
def small_report(rng):
    ds = random_dataset(rng, p=25, n_feat=5, q=3, name="alpha")
    return run_experiment(small_config(repeats=2), [ds])


class TestDeterminism:
    def test_json_reemission_identical(self, small_report, tmp_path):
        a = (tmp_path / "a")
        b = (tmp_path / "b")
        emit_report(small_report, a, figures=False)
        emit_report(small_report, b, figures=False)
        for name in ("report.json", "report.csv", "report.md"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_json_loads_back(self, small_report):
        assert json.loads(report_json(small_report)) == small_report


class TestCsv:
    def test_long_form_columns(self, small_report):
        lines = report_csv(small_report).splitlines()
        assert lines[0] == "dataset,method,d,metric,mean,std,seeds"
        # 1 dataset x 2 methods x 1 d x 4 metrics
        assert len(lines) == 1 + 8
        first = lines[1].split(",")
        assert first[0] == "alpha"
        float(first[4])  # parses
        assert ";" not in first[0]


class TestMarkdown:
    def test_shape_single_dataset(self, small_report):
        text = report_markdown(small_report)
        for metric in ("hamming_loss", "ml_accuracy", "one_error", "ranking_loss"):
            assert f"## {metric} (d=3)" in text
        block = [ln for ln in text.splitlines() if ln.startswith("| alpha")]
        assert len(block) == 4  # one data row per metric table
        assert any(ln.startswith("| Avg.Rank") for ln in text.splitlines())

    def test_bold_exactly_once_per_row(self, small_report):
        for line in report_markdown(small_report).splitlines():
            if line.startswith("| alpha") or line.startswith("| Avg.Rank"):
                assert line.count("**") == 2, line

    def test_tie_bolds_lowest_method_index(self):
        report = {
            "datasets": [{"name": "d1", "instances": 5, "features": 2, "labels": 2}],
            "aggregates": {
                "d1": {
                    "m1": {"3": {"metrics": {"ml_accuracy": {"mean": 0.5, "std": 0.0}},
                                  "seeds": [1]}},
                    "m2": {"3": {"metrics": {"ml_accuracy": {"mean": 0.5, "std": 0.0}},
                                  "seeds": [1]}},
                }
            },
            "rank_tables": {
                "ml_accuracy": {"3": {
                    "methods": ["m1", "m2"],
                    "direction": "higher_better",
                    "average_rank": [1.5, 1.5],
                    "per_dataset_ranks": {"d1": [1.5, 1.5]},
                }}
            },
        }
        text = report_markdown(report)
        row = next(ln for ln in text.splitlines() if ln.startswith("| d1"))
        cells = [c.strip() for c in row.split("|")[2:-1]]
        assert cells[0].startswith("**") and not cells[1].startswith("**")


class TestEmit:
    def test_figures_written(self, small_report, tmp_path):
        paths = emit_report(small_report, tmp_path / "out", figures=True)
        pngs = [p for p in paths if p.suffix == ".png"]
        # 4 metrics x 1 d x 2 figure kinds
        assert len(pngs) == 8
        for p in pngs:
            data = p.read_bytes()
            assert data[:8] == b"\x89PNG\r\n\x1a\n" and len(data) > 1000

    def test_unknown_format_rejected(self, small_report, tmp_path):
        with pytest.raises(ReportError, match="unknown report formats"):
            emit_report(small_report, tmp_path, formats=("yaml",), figures=False)

    def test_subset_formats(self, small_report, tmp_path):
        paths = emit_report(small_report, tmp_path, formats=("csv",), figures=False)
        assert [p.name for p in paths] == ["report.csv"]
