#!/usr/bin/env python3
"""Convert multi-label datasets shipped in the CRAN 'mldr' / 'mldr.datasets'
R packages into the ARFF + label-XML layout this project consumes, and build
the checksum manifest for the bundled cache.

Usage:
    python tools/convert_mldr.py <dataset.rda> <object-name> <out-dir>

Requires the pure-Python 'rdata' package (pip install rdata).  The output is
deterministic (fixed zip timestamps), so regenerated archives hash
identically.
"""

from __future__ import annotations

import hashlib
import json
import sys
import warnings
import zipfile
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from ufsbench.arff import serialize_arff
from ufsbench.dataset import MultiLabelDataset

SOURCE_PAGE = "https://www.uco.es/kdis/mllresources/"


def load_mldr_object(rda_path: Path, name: str):
    import rdata

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        converted = rdata.conversion.convert(rdata.parser.parse_file(rda_path))
    return converted[name]


def to_dataset(obj, name: str) -> MultiLabelDataset:
    frame = obj["dataset"]
    feature_cols = [int(i) - 1 for i in np.asarray(obj["attributesIndexes"])]
    labels_df = obj["labels"]
    label_cols = [int(i) - 1 for i in np.asarray(labels_df["index"])]
    label_names = [str(n) for n in labels_df.index]
    feature_names = [str(frame.columns[c]) for c in feature_cols]

    X = np.empty((frame.shape[0], len(feature_cols)))
    for out_col, c in enumerate(feature_cols):
        X[:, out_col] = np.asarray(frame.iloc[:, c], dtype=np.float64)
    Y = np.empty((frame.shape[0], len(label_cols)), dtype=int)
    for out_col, c in enumerate(label_cols):
        Y[:, out_col] = np.asarray(frame.iloc[:, c], dtype=np.float64).astype(int)

    measures = obj["measures"]
    assert int(np.asarray(measures["num.instances"])[0]) == X.shape[0]
    assert int(np.asarray(measures["num.inputs"])[0]) == X.shape[1]
    assert int(np.asarray(measures["num.labels"])[0]) == Y.shape[1]
    cardinality = float(np.asarray(measures["cardinality"])[0])
    assert abs(Y.sum(axis=1).mean() - cardinality) < 1e-6
    counts = np.asarray(labels_df["count"], dtype=float)
    assert np.array_equal(Y.sum(axis=0).astype(float), counts)

    return MultiLabelDataset(name, X, Y, feature_names, label_names)


def label_xml(ds: MultiLabelDataset) -> str:
    lines = ['<?xml version="1.0" encoding="utf-8"?>',
             '<labels xmlns="http://mulan.sourceforge.net/labels">']
    for label in ds.label_names:
        lines.append(f'  <label name="{label}"></label>')
    lines.append("</labels>")
    lines.append("")
    return "\n".join(lines)


def write_outputs(ds: MultiLabelDataset, out_dir: Path) -> dict:
    out_dir.mkdir(parents=True, exist_ok=True)
    arff_text = serialize_arff(ds)
    xml_text = label_xml(ds)
    (out_dir / f"{ds.name}.arff").write_text(arff_text)
    (out_dir / f"{ds.name}.xml").write_text(xml_text)

    cache_dir = out_dir / "cache"
    cache_dir.mkdir(exist_ok=True)
    zip_path = cache_dir / f"{ds.name}__{ds.name}.zip"
    with zipfile.ZipFile(zip_path, "w", compression=zipfile.ZIP_DEFLATED) as zf:
        for member, text in ((f"{ds.name}.arff", arff_text), (f"{ds.name}.xml", xml_text)):
            info = zipfile.ZipInfo(member, date_time=(1980, 1, 1, 0, 0, 0))
            info.compress_type = zipfile.ZIP_DEFLATED
            zf.writestr(info, text)
    sha = hashlib.sha256(zip_path.read_bytes()).hexdigest()
    return {
        "name": ds.name,
        "url": f"{SOURCE_PAGE}{ds.name}.zip",
        "sha256": sha,
        "labels": {"xml": f"{ds.name}.xml"},
    }


def main() -> int:
    if len(sys.argv) != 4:
        print(__doc__, file=sys.stderr)
        return 1
    rda_path, name, out_dir = Path(sys.argv[1]), sys.argv[2], Path(sys.argv[3])
    ds = to_dataset(load_mldr_object(rda_path, name), name)
    entry = write_outputs(ds, out_dir)
    print(json.dumps(entry, indent=2))
    manifest_path = out_dir / "manifest.json"
    existing = []
    if manifest_path.exists():
        existing = [e for e in json.loads(manifest_path.read_text()) if e["name"] != name]
    existing.append(entry)
    existing.sort(key=lambda e: e["name"])
    manifest_path.write_text(json.dumps(existing, indent=2) + "\n")
    print(f"p={ds.n_instances} F={ds.n_features} q={ds.n_labels} "
          f"cardinality={ds.Y.sum(axis=1).mean():.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
