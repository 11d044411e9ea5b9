"""Command-line interface.

Subcommands:
  fetch   download/verify the datasets listed in a manifest into the cache
  run     execute an experiment grid from a JSON config and emit reports
  study   per-label instantiation study on one dataset of a config
  report  re-emit formats/figures from a previously written report.json
  select  score one dataset's features with a selector and print the ranking

Exit codes: 0 success, 2 partial (some datasets failed), 1 fatal.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .arff import LabelSpec, parse_arff, parse_label_xml
from .harness import config_from_json, load_datasets, run_experiment, single_label_study
from .manifest import default_cache_dir, fetch_manifest
from .report import FORMATS, emit_report
from .selectors import METHODS, SelectorConfig, select, top_d

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_PARTIAL = 2


def _cmd_fetch(args) -> int:
    result = fetch_manifest(args.manifest, cache_dir=args.cache_dir, offline=args.offline)
    for ds in result.datasets:
        print(f"ok      {ds.name}: p={ds.n_instances} F={ds.n_features} q={ds.n_labels}")
    for name, message in result.failures:
        print(f"failed  {name}: {message}", file=sys.stderr)
    if not result.datasets and result.failures:
        return EXIT_FATAL
    return EXIT_OK if result.ok else EXIT_PARTIAL


def _cmd_run(args) -> int:
    cfg = config_from_json(args.config)
    datasets, failures = load_datasets(cfg)
    if not datasets:
        print("no datasets could be loaded", file=sys.stderr)
        for name, message in failures:
            print(f"failed  {name}: {message}", file=sys.stderr)
        return EXIT_FATAL
    report = run_experiment(cfg, datasets)
    report["failures"] = [list(f) for f in failures]
    out_dir = args.out_dir or cfg.output_dir
    written = emit_report(report, out_dir, figures=not args.no_figures)
    for path in written:
        print(f"wrote {path}")
    for name, message in failures:
        print(f"failed  {name}: {message}", file=sys.stderr)
    return EXIT_OK if not failures else EXIT_PARTIAL


def _cmd_study(args) -> int:
    cfg = config_from_json(args.config)
    datasets, failures = load_datasets(cfg)
    matches = [ds for ds in datasets if ds.name == args.dataset]
    if not matches:
        available = ", ".join(ds.name for ds in datasets) or "(none)"
        print(f"dataset '{args.dataset}' not found; available: {available}",
              file=sys.stderr)
        return EXIT_FATAL
    study = single_label_study(cfg, matches[0])
    out_dir = Path(args.out_dir or cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"study_{args.dataset}.json"
    path.write_text(json.dumps(study, sort_keys=True, separators=(",", ":")) + "\n")
    print(f"wrote {path}")
    print(f"min pairwise tau between per-label rankings: {study['min_pairwise_tau']:.3f}")
    for label, tau in study["tau_vs_multilabel"].items():
        print(f"tau vs multi-label ranking, {label}: {tau:.3f}")
    return EXIT_OK if not failures else EXIT_PARTIAL


def _cmd_report(args) -> int:
    try:
        report = json.loads(Path(args.report).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cannot read report: {exc}", file=sys.stderr)
        return EXIT_FATAL
    formats = tuple(args.format) if args.format else FORMATS
    written = emit_report(
        report, args.out_dir, formats=formats, figures=not args.no_figures
    )
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def _label_spec_from_args(args, arff_path: Path) -> LabelSpec:
    if args.labels_xml:
        return parse_label_xml(Path(args.labels_xml).read_text())
    if args.labels_first:
        return LabelSpec.first(args.labels_first)
    if args.labels_last:
        return LabelSpec.last(args.labels_last)
    sidecar = arff_path.with_suffix(".xml")
    if sidecar.exists():
        return parse_label_xml(sidecar.read_text())
    raise SystemExit("no label specification (use --labels-xml/--labels-first/--labels-last)")


def _cmd_select(args) -> int:
    arff_path = Path(args.dataset)
    ds = parse_arff(arff_path.read_text(), _label_spec_from_args(args, arff_path))
    cfg = SelectorConfig(
        method=args.method,
        graph_k=args.graph_k,
        mcfs_clusters=args.clusters,
        mcfs_cardinality=args.d,
        seed=args.seed,
        external_path=args.external_path,
    )
    ranking = select(ds.X, cfg)
    d = args.d or ds.n_features
    chosen = top_d(ranking, min(d, ds.n_features))
    print(f"# {ds.name}: top {len(chosen)} of {ds.n_features} features by {args.method}")
    for rank, j in enumerate(chosen, start=1):
        print(f"{rank}\t{j}\t{ds.feature_names[j]}\t{ranking.scores[j]:.6g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ufsbench",
        description="Benchmark unsupervised feature selection under multi-label evaluation",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fetch", help="download manifest datasets into the cache")
    p.add_argument("manifest")
    p.add_argument("--cache-dir", default=None,
                   help=f"cache directory (default: $UFSBENCH_CACHE or {default_cache_dir()})")
    p.add_argument("--offline", action="store_true", help="use the cache only")
    p.set_defaults(func=_cmd_fetch)

    p = sub.add_parser("run", help="run an experiment grid")
    p.add_argument("config", help="experiment config JSON")
    p.add_argument("--out-dir", default=None, help="override the config output_dir")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("study", help="single-label instantiation study")
    p.add_argument("config", help="experiment config JSON")
    p.add_argument("dataset", help="dataset name within the config")
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=_cmd_study)

    p = sub.add_parser("report", help="re-emit formats from a report.json")
    p.add_argument("report")
    p.add_argument("--format", action="append", choices=FORMATS,
                   help="repeatable; default: all formats")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("select", help="print a feature ranking for one dataset")
    p.add_argument("dataset", help="ARFF file")
    p.add_argument("--method", required=True, choices=METHODS)
    p.add_argument("--d", type=int, default=None, help="how many features to print")
    p.add_argument("--graph-k", type=int, default=5)
    p.add_argument("--clusters", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--external-path", default=None)
    p.add_argument("--labels-xml", default=None)
    p.add_argument("--labels-first", type=int, default=None)
    p.add_argument("--labels-last", type=int, default=None)
    p.set_defaults(func=_cmd_select)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
