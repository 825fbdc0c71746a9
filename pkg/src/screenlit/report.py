"""Metric tables, rankings, and plot-ready summaries.

All renderers produce deterministic bytes for fixed inputs: model columns
are sorted, float formatting is fixed-width, and no timestamps or
environment details leak into the output.
"""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
from dataclasses import asdict, dataclass
from typing import Mapping

from .model import MetricSet, MetricValue
from .resampling import SubsampleDistribution

RANK_KEYS = ("wmcc", "mcc", "cost", "lost_evidence")
_RANK_DESCENDING = {"wmcc": True, "mcc": True, "cost": False, "lost_evidence": False}

FORMATS = ("text", "markdown", "csv", "json")


class UnsupportedFormatError(ValueError):
    """The requested output format is not one of text/markdown/csv/json."""


def rank_models(
    results: Mapping[str, MetricSet], key: str
) -> list[tuple[str, MetricValue]]:
    """Order models by one metric, best first.

    wmcc and mcc rank descending, cost and lost_evidence ascending.
    Undefined values rank after all defined ones. Ties break by lower cost,
    then lower lost evidence (undefined last), then model id.
    """
    if key not in RANK_KEYS:
        raise ValueError(f"unknown ranking key {key!r}, expected one of {RANK_KEYS}")
    if not results:
        raise ValueError("results must be nonempty")
    descending = _RANK_DESCENDING[key]

    def sort_key(item: tuple[str, MetricSet]):
        model, ms = item
        value = getattr(ms, key)
        lost = ms.lost_evidence if ms.lost_evidence is not None else math.inf
        if value is None:
            primary = (1, 0.0)
        else:
            primary = (0, -value if descending else value)
        return (*primary, ms.cost, lost, model)

    ordered = sorted(results.items(), key=sort_key)
    return [(model, getattr(ms, key)) for model, ms in ordered]


# Table rows: (MetricSet field, display label, format kind). Percent metrics
# always render with 2 decimals; correlation-style metrics honor the
# configured decimals; plain ratios use 2 decimals; cost renders as an
# integer when integral.
_TABLE_ROWS: tuple[tuple[str, str, str], ...] = (
    ("total_n", "Total N", "count"),
    ("lost_evidence", "Evidence Lost", "percent"),
    ("accuracy", "Accuracy", "percent"),
    ("pabak", "PABAK", "correlation"),
    ("mcc", "MCC", "correlation"),
    ("wmcc", "Weighted MCC", "correlation"),
    ("precision", "Precision", "ratio"),
    ("recall", "Recall", "ratio"),
    ("specificity", "Specificity", "ratio"),
    ("f1", "F1", "ratio"),
    ("cost", "Cost", "cost"),
    ("referral_rate", "Referral Rate", "percent"),
)

_HIGHER_BETTER = frozenset(
    {"accuracy", "pabak", "mcc", "wmcc", "precision", "recall", "specificity", "f1"}
)
_LOWER_BETTER = frozenset({"lost_evidence", "cost", "referral_rate"})


def format_value(value: MetricValue, kind: str, decimals: int = 3) -> str:
    """One cell: fixed-width numeric formatting, 'NaN' for undefined."""
    if value is None:
        return "NaN"
    if kind == "percent":
        return f"{value * 100:.2f}%"
    if kind == "correlation":
        return f"{value:.{decimals}f}"
    if kind == "ratio":
        return f"{value:.2f}"
    if kind == "cost":
        return str(int(value)) if value == int(value) else f"{value:.2f}"
    if kind == "count":
        return str(int(value))
    raise ValueError(f"unknown format kind {kind!r}")


def _best_models(
    field: str, values: dict[str, MetricValue], kind: str, decimals: int
) -> set[str]:
    """Models whose rendered cell ties the best defined value of the row.

    Marking works on the rendered value, so models indistinguishable at the
    displayed precision share the marker even when one is fractionally ahead.
    """
    if field in _HIGHER_BETTER:
        pick = max
    elif field in _LOWER_BETTER:
        pick = min
    else:
        return set()
    defined = {model: v for model, v in values.items() if v is not None}
    if not defined:
        return set()
    best_rendered = format_value(pick(defined.values()), kind, decimals)
    return {m for m, v in defined.items() if format_value(v, kind, decimals) == best_rendered}


def _table_cells(
    results: Mapping[str, MetricSet], decimals: int, markers: bool
) -> tuple[list[str], list[list[str]]]:
    models = sorted(results)
    header = ["Metric", *models]
    if not models:
        return header, []
    rows = []
    for field, label, kind in _TABLE_ROWS:
        values = {model: getattr(results[model], field) for model in models}
        best = _best_models(field, values, kind, decimals) if markers else set()
        cells = [label]
        for model in models:
            rendered = format_value(values[model], kind, decimals)
            if model in best:
                rendered += "*"
            cells.append(rendered)
        rows.append(cells)
    return header, rows


def render_table(
    results: Mapping[str, MetricSet], decimals: int = 3, fmt: str = "text"
) -> str:
    """Render one metric table, metrics as rows and models as columns.

    text and markdown mark the best cell per row with '*' (all cells tying
    the best rendered value are marked; undefined never wins). csv carries
    the same cells without markers; json emits one object per model with
    every MetricSet field, undefined as null.
    """
    if fmt == "json":
        payload = [
            {"model": model, **asdict(results[model])} for model in sorted(results)
        ]
        return json.dumps(payload, indent=2) + "\n"
    if fmt == "csv":
        header, rows = _table_cells(results, decimals, markers=False)
        out = io.StringIO()
        writer = csv.writer(out)
        writer.writerow(header)
        writer.writerows(rows)
        return out.getvalue()
    if fmt == "markdown":
        header, rows = _table_cells(results, decimals, markers=True)
        lines = [
            "| " + " | ".join(header) + " |",
            "| " + " | ".join("---" for _ in header) + " |",
        ]
        lines += ["| " + " | ".join(row) + " |" for row in rows]
        return "\n".join(lines) + "\n"
    if fmt == "text":
        header, rows = _table_cells(results, decimals, markers=True)
        widths = [
            max(len(line[i]) for line in [header, *rows]) for i in range(len(header))
        ]
        lines = []
        for line in [header, *rows]:
            first = line[0].ljust(widths[0])
            rest = [cell.rjust(widths[i + 1]) for i, cell in enumerate(line[1:])]
            lines.append("  ".join([first, *rest]).rstrip())
        return "\n".join(lines) + "\n"
    raise UnsupportedFormatError(f"unknown format {fmt!r}, expected one of {FORMATS}")


@dataclass(frozen=True)
class LostEvidenceSummary:
    """Spread of lost evidence for one model across datasets."""

    model: str
    datasets: int
    min: MetricValue
    median: MetricValue
    max: MetricValue
    undefined_excluded: bool


def lost_evidence_summary(
    results: Mapping[tuple[str, str | None], MetricSet]
) -> list[LostEvidenceSummary]:
    """Per-model min/median/max of lost evidence across datasets.

    Datasets where lost evidence is undefined are excluded from the spread
    and flagged via undefined_excluded. Models sort alphabetically.
    """
    by_model: dict[str, list[MetricValue]] = {}
    for (model, _dataset), ms in results.items():
        by_model.setdefault(model, []).append(ms.lost_evidence)
    summaries = []
    for model in sorted(by_model):
        values = by_model[model]
        defined = sorted(v for v in values if v is not None)
        if defined:
            summaries.append(
                LostEvidenceSummary(
                    model=model,
                    datasets=len(values),
                    min=defined[0],
                    median=statistics.median(defined),
                    max=defined[-1],
                    undefined_excluded=len(defined) < len(values),
                )
            )
        else:
            summaries.append(
                LostEvidenceSummary(
                    model=model,
                    datasets=len(values),
                    min=None,
                    median=None,
                    max=None,
                    undefined_excluded=True,
                )
            )
    return summaries


_DISTRIBUTION_STATISTICS = (
    "mean", "sd", "min", "q05", "q25", "median", "q75", "q95", "max",
    "undefined_fraction",
)


def _stat_text(value: float) -> str:
    return "NaN" if math.isnan(value) else repr(value)


def render_distributions(
    distributions: list[SubsampleDistribution], fmt: str = "text"
) -> str:
    """Render subsample summaries.

    csv and json emit one row per (size, statistic); text shows one line per
    size with statistic columns.
    """
    if fmt == "json":
        payload = [
            {
                "size": dist.size,
                "statistic": stat,
                "value": None if math.isnan(getattr(dist, stat)) else getattr(dist, stat),
            }
            for dist in distributions
            for stat in _DISTRIBUTION_STATISTICS
        ]
        return json.dumps(payload, indent=2) + "\n"
    if fmt == "csv":
        out = io.StringIO()
        writer = csv.writer(out)
        writer.writerow(["size", "statistic", "value"])
        for dist in distributions:
            for stat in _DISTRIBUTION_STATISTICS:
                writer.writerow([dist.size, stat, _stat_text(getattr(dist, stat))])
        return out.getvalue()
    if fmt == "text":
        header = ["size", *_DISTRIBUTION_STATISTICS]
        rows = [
            [str(dist.size)]
            + [
                "NaN" if math.isnan(getattr(dist, stat)) else f"{getattr(dist, stat):.6f}"
                for stat in _DISTRIBUTION_STATISTICS
            ]
            for dist in distributions
        ]
        widths = [max(len(line[i]) for line in [header, *rows]) for i in range(len(header))]
        lines = [
            "  ".join(cell.rjust(widths[i]) for i, cell in enumerate(line)).rstrip()
            for line in [header, *rows]
        ]
        return "\n".join(lines) + "\n"
    raise UnsupportedFormatError(f"unknown format {fmt!r}, expected text, csv, or json")


_RANK_VALUE_KIND = {
    "wmcc": "correlation",
    "mcc": "correlation",
    "cost": "cost",
    "lost_evidence": "percent",
}


def render_ranking(
    ranking: list[tuple[str, MetricValue]],
    key: str,
    fmt: str = "text",
    decimals: int = 3,
) -> str:
    """Render a rank_models result (rank, model, value)."""
    kind = _RANK_VALUE_KIND[key]
    if fmt == "json":
        payload = [
            {"rank": i, "model": model, key: value}
            for i, (model, value) in enumerate(ranking, start=1)
        ]
        return json.dumps(payload, indent=2) + "\n"
    if fmt == "csv":
        out = io.StringIO()
        writer = csv.writer(out)
        writer.writerow(["rank", "model", key])
        for i, (model, value) in enumerate(ranking, start=1):
            writer.writerow([i, model, format_value(value, kind, decimals)])
        return out.getvalue()
    if fmt == "text":
        lines = [
            f"{i}. {model}  {format_value(value, kind, decimals)}"
            for i, (model, value) in enumerate(ranking, start=1)
        ]
        return "\n".join(lines) + "\n"
    raise UnsupportedFormatError(f"unknown format {fmt!r}, expected text, csv, or json")
