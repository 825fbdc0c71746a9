"""Command-line interface.

Commands: evaluate, reconstruct, subsample, lint, rank.

Exit codes: 0 ok, 1 input or usage error, 2 lint errors, 3 guardrail
failure. Identical invocations (same files, flags, seed) produce
byte-identical stdout; progress notices go to stderr.

The master seed defaults to $SCREENLIT_SEED (or 0) and is overridden by
--seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict
from pathlib import Path

from .compliance import (
    findings_to_json,
    guardrail_check,
    has_errors,
    lint_manifest,
    manifest_from_json,
)
from .ingestion import (
    IngestError,
    build_matrix,
    load_matrices,
    matrix_to_json,
    parse_records,
    reconstruct_matrix,
)
from .metrics import metric_set
from .model import ConfusionMatrix, CostModel, MetricSet, PartialCounts
from .report import (
    RANK_KEYS,
    lost_evidence_summary,
    rank_models,
    render_distributions,
    render_ranking,
    render_table,
)
from .resampling import SUBSAMPLE_METRICS, SubsamplePlan, subsample_distribution


class _Parser(argparse.ArgumentParser):
    # Usage mistakes are input errors (exit 1); 2 is reserved for lint errors.
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    return int(os.environ.get("SCREENLIT_SEED", "0"))


def _read_record_groups(path: Path):
    fmt = "json" if path.suffix.lower() == ".json" else "csv"
    return parse_records(path.read_bytes(), fmt=fmt)


def _load_matrix_map(args) -> dict[tuple[str, str | None], ConfusionMatrix]:
    """(model label, dataset) -> matrix, from --input records or --cm JSON."""
    matrices: dict[tuple[str, str | None], ConfusionMatrix] = {}
    if args.input is not None:
        for (model, dataset), records in _read_record_groups(args.input).items():
            key = (model or "model", dataset)
            if key in matrices:
                raise IngestError(
                    f"records for model {key[0]!r}, dataset {key[1]!r} collide "
                    "with an unnamed-model group"
                )
            matrices[key] = build_matrix(records)
        return matrices
    for index, (model, dataset, cm) in enumerate(load_matrices(args.cm.read_bytes()), start=1):
        key = (model or f"model-{index}", dataset)
        if key in matrices:
            raise IngestError(f"duplicate matrix for model {key[0]!r}, dataset {key[1]!r}")
        matrices[key] = cm
    return matrices


def _results_by_dataset(
    matrices: dict[tuple[str, str | None], ConfusionMatrix], cost_model: CostModel
) -> dict[str | None, dict[str, MetricSet]]:
    results: dict[str | None, dict[str, MetricSet]] = {}
    for (model, dataset), cm in matrices.items():
        results.setdefault(dataset, {})[model] = metric_set(cm, cost_model)
    return results


def _sorted_datasets(results) -> list[str | None]:
    return sorted(results, key=lambda d: (d is not None, d or ""))


def _cmd_evaluate(args) -> int:
    matrices = _load_matrix_map(args)
    results = _results_by_dataset(matrices, CostModel(weight=args.weight))
    datasets = _sorted_datasets(results)
    multi = len(datasets) > 1

    if not datasets:
        sys.stdout.write(render_table({}, decimals=args.decimals, fmt=args.format))
        return 0
    if not multi:
        sys.stdout.write(render_table(results[datasets[0]], decimals=args.decimals, fmt=args.format))
    elif args.format == "json":
        payload = [
            {
                "dataset": dataset,
                "models": [
                    {"model": model, **asdict(ms)}
                    for model, ms in sorted(results[dataset].items())
                ],
            }
            for dataset in datasets
        ]
        sys.stdout.write(json.dumps(payload, indent=2) + "\n")
    elif args.format == "csv":
        parts = []
        for dataset in datasets:
            parts.append(f"dataset,{dataset if dataset is not None else ''}\r\n")
            parts.append(render_table(results[dataset], decimals=args.decimals, fmt="csv"))
        sys.stdout.write("".join(parts))
    else:
        parts = []
        for dataset in datasets:
            label = dataset if dataset is not None else "(none)"
            parts.append(f"Dataset: {label}\n\n")
            parts.append(render_table(results[dataset], decimals=args.decimals, fmt=args.format))
            parts.append("\n")
        sys.stdout.write("".join(parts[:-1]))

    if args.plot_dir is not None:
        from . import figures

        args.plot_dir.mkdir(parents=True, exist_ok=True)
        pairs = {
            (model, dataset): ms
            for dataset in datasets
            for model, ms in results[dataset].items()
        }
        out = figures.plot_lost_evidence(
            lost_evidence_summary(pairs), args.plot_dir / "lost_evidence.png"
        )
        print(f"wrote {out}", file=sys.stderr)

    if args.max_lost_evidence is not None:
        failed = False
        for dataset in datasets:
            for model in sorted(results[dataset]):
                outcome = guardrail_check(results[dataset][model], args.max_lost_evidence)
                if outcome.passed:
                    continue
                failed = True
                where = model if dataset is None else f"{model} [{dataset}]"
                actual = "NaN" if outcome.actual is None else f"{outcome.actual:.4f}"
                print(
                    f"guardrail failed: {where}: lost evidence {actual} "
                    f"exceeds threshold {outcome.threshold:.4f}",
                    file=sys.stderr,
                )
        if failed:
            return 3
    return 0


def _cmd_reconstruct(args) -> int:
    cm = reconstruct_matrix(
        PartialCounts(
            gold_negatives=args.gold_negatives,
            gold_positives=args.gold_positives,
            predicted_negatives=args.predicted_negatives,
            true_negatives=args.true_negatives,
        )
    )
    sys.stdout.write(json.dumps(matrix_to_json(cm), indent=2) + "\n")
    return 0


def _cmd_subsample(args) -> int:
    groups = _read_record_groups(args.input)
    records = [record for group in groups.values() for record in group]
    plan = SubsamplePlan(
        sizes=tuple(int(part) for part in args.sizes.split(",")),
        iterations=args.iterations,
        seed=_resolve_seed(args.seed),
        metric=args.metric,
        cost_model=CostModel(weight=args.weight),
    )
    distributions = subsample_distribution(records, plan)
    sys.stdout.write(render_distributions(distributions, fmt=args.format))
    if args.plot_dir is not None:
        from . import figures

        args.plot_dir.mkdir(parents=True, exist_ok=True)
        out = figures.plot_subsample_stability(
            distributions, args.metric, args.plot_dir / f"subsample_stability_{args.metric}.png"
        )
        print(f"wrote {out}", file=sys.stderr)
    return 0


def _cmd_lint(args) -> int:
    try:
        data = json.loads(args.manifest.read_bytes())
    except json.JSONDecodeError as exc:
        print(f"error: invalid manifest JSON: {exc}", file=sys.stderr)
        return 1
    findings = lint_manifest(manifest_from_json(data))
    if args.format == "json":
        sys.stdout.write(json.dumps(findings_to_json(findings), indent=2) + "\n")
    else:
        for finding in findings:
            sys.stdout.write(f"{finding.rule_id} {finding.severity}: {finding.message}\n")
    return 2 if has_errors(findings) else 0


def _cmd_rank(args) -> int:
    matrices = _load_matrix_map(args)
    if not matrices:
        raise IngestError("no records or matrices found, nothing to rank")
    results = _results_by_dataset(matrices, CostModel(weight=args.weight))
    datasets = _sorted_datasets(results)
    multi = len(datasets) > 1
    if not multi:
        ranking = rank_models(results[datasets[0]], args.key)
        sys.stdout.write(render_ranking(ranking, args.key, fmt=args.format, decimals=args.decimals))
        return 0
    if args.format == "json":
        payload = [
            {
                "dataset": dataset,
                "ranking": [
                    {"rank": i, "model": model, args.key: value}
                    for i, (model, value) in enumerate(rank_models(results[dataset], args.key), 1)
                ],
            }
            for dataset in datasets
        ]
        sys.stdout.write(json.dumps(payload, indent=2) + "\n")
        return 0
    parts = []
    for dataset in datasets:
        label = dataset if dataset is not None else "(none)"
        parts.append(f"Dataset: {label}\n")
        parts.append(
            render_ranking(rank_models(results[dataset], args.key), args.key,
                           fmt=args.format, decimals=args.decimals)
        )
        parts.append("\n")
    sys.stdout.write("".join(parts[:-1]))
    return 0


def _add_source_arguments(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--input", type=Path, help="labeled records file (.csv or .json)")
    source.add_argument("--cm", type=Path, help="confusion-matrix JSON file")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="screenlit",
        description="Chance-anchored, cost-sensitive evaluation of literature-screening classifiers.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    evaluate = sub.add_parser("evaluate", help="compute metric tables from records or matrices")
    _add_source_arguments(evaluate)
    evaluate.add_argument("--weight", type=float, default=10.0,
                          help="FN:FP cost ratio (default 10)")
    evaluate.add_argument("--format", choices=("text", "markdown", "csv", "json"),
                          default="text", help="output format (default text)")
    evaluate.add_argument("--decimals", type=int, default=3,
                          help="decimals for correlation metrics (default 3)")
    evaluate.add_argument("--max-lost-evidence", type=float, default=None, metavar="T",
                          help="lost-evidence guardrail in [0,1]; exit 3 when exceeded")
    evaluate.add_argument("--plot-dir", type=Path, default=None,
                          help="also write a lost-evidence figure (PNG) into this directory")
    evaluate.set_defaults(run=_cmd_evaluate)

    reconstruct = sub.add_parser(
        "reconstruct", help="derive a full confusion matrix from partial counts"
    )
    reconstruct.add_argument("--N", dest="gold_negatives", type=int, required=True,
                             help="gold-negative count")
    reconstruct.add_argument("--P", dest="gold_positives", type=int, required=True,
                             help="gold-positive count")
    reconstruct.add_argument("--n", dest="predicted_negatives", type=int, required=True,
                             help="predicted-negative count")
    reconstruct.add_argument("--TN", dest="true_negatives", type=int, required=True,
                             help="true-negative count")
    reconstruct.set_defaults(run=_cmd_reconstruct)

    subsample = sub.add_parser(
        "subsample", help="subsample-without-replacement stability analysis"
    )
    subsample.add_argument("--input", type=Path, required=True,
                           help="labeled records file (.csv or .json); "
                                "the whole file is treated as one population")
    subsample.add_argument("--sizes", default="100,200,300,400,500",
                           help="comma-separated subsample sizes (default 100,200,300,400,500)")
    subsample.add_argument("--iterations", type=int, default=10_000,
                           help="draws per size (default 10000)")
    subsample.add_argument("--seed", type=int, default=None,
                           help="master seed (default $SCREENLIT_SEED or 0)")
    subsample.add_argument("--metric", choices=SUBSAMPLE_METRICS, default="wmcc",
                           help="metric to track (default wmcc)")
    subsample.add_argument("--weight", type=float, default=10.0,
                           help="FN:FP cost ratio (default 10)")
    subsample.add_argument("--format", choices=("text", "csv", "json"), default="text",
                           help="output format (default text)")
    subsample.add_argument("--plot-dir", type=Path, default=None,
                           help="also write a stability figure (PNG) into this directory")
    subsample.set_defaults(run=_cmd_subsample)

    lint = sub.add_parser("lint", help="lint an evaluation manifest")
    lint.add_argument("--manifest", type=Path, required=True, help="manifest JSON file")
    lint.add_argument("--format", choices=("text", "json"), default="text",
                      help="output format (default text)")
    lint.set_defaults(run=_cmd_lint)

    rank = sub.add_parser("rank", help="rank models by one metric")
    _add_source_arguments(rank)
    rank.add_argument("--key", choices=RANK_KEYS, default="wmcc",
                      help="ranking metric (default wmcc)")
    rank.add_argument("--weight", type=float, default=10.0,
                      help="FN:FP cost ratio (default 10)")
    rank.add_argument("--decimals", type=int, default=3,
                      help="decimals for correlation metrics (default 3)")
    rank.add_argument("--format", choices=("text", "csv", "json"), default="text",
                      help="output format (default text)")
    rank.set_defaults(run=_cmd_rank)

    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.run(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
