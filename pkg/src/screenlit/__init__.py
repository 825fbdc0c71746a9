"""Chance-anchored, cost-sensitive evaluation of literature-screening classifiers.

The library evaluates include/exclude screening decisions against gold
labels with metrics that stay honest under heavy class imbalance (MCC and
a cost-weighted MCC), tracks lost evidence and misclassification cost,
treats unclassifiable outputs as referred back to human review instead of
dropping them, estimates metric stability by subsampling validation data
without replacement, and lints evaluation reports against a registry of
reporting rules.
"""

from .compliance import (
    EvaluationManifest,
    GuardrailResult,
    LintFinding,
    ManifestError,
    RULE_REGISTRY,
    guardrail_check,
    lint_manifest,
    manifest_from_json,
)
from .ingestion import (
    DuplicateIdError,
    IngestError,
    InconsistentCountsError,
    MalformedRowError,
    MixedGroupsError,
    UnknownLabelTokenError,
    build_matrix,
    group_records,
    load_matrices,
    matrix_from_json,
    matrix_to_json,
    parse_records,
    partial_counts_of,
    reconstruct_matrix,
    records_from_matrix,
)
from .metrics import (
    WeightedCounts,
    basic_metrics,
    cost,
    mcc,
    mcc_from_counts,
    metric_set,
    weighted_counts,
    wmcc,
)
from .model import (
    ConfusionMatrix,
    CostModel,
    GoldLabel,
    LabeledRecord,
    MatrixError,
    MetricSet,
    MetricValue,
    NegativeCountError,
    PartialCounts,
    RawPrediction,
    ReferredBackExceedsCellError,
    validate_matrix,
)
from .report import (
    LostEvidenceSummary,
    UnsupportedFormatError,
    format_value,
    lost_evidence_summary,
    rank_models,
    render_distributions,
    render_ranking,
    render_table,
)
from .resampling import (
    SUBSAMPLE_METRICS,
    SizeExceedsPopulationError,
    SubsampleDistribution,
    SubsamplePlan,
    subsample_distribution,
    subsample_metric_values,
)

__version__ = "0.1.0"

__all__ = [
    "ConfusionMatrix",
    "CostModel",
    "DuplicateIdError",
    "EvaluationManifest",
    "GoldLabel",
    "GuardrailResult",
    "IngestError",
    "InconsistentCountsError",
    "LabeledRecord",
    "LintFinding",
    "LostEvidenceSummary",
    "MalformedRowError",
    "ManifestError",
    "MatrixError",
    "MetricSet",
    "MetricValue",
    "MixedGroupsError",
    "NegativeCountError",
    "PartialCounts",
    "RawPrediction",
    "ReferredBackExceedsCellError",
    "RULE_REGISTRY",
    "SizeExceedsPopulationError",
    "SUBSAMPLE_METRICS",
    "SubsampleDistribution",
    "SubsamplePlan",
    "UnknownLabelTokenError",
    "UnsupportedFormatError",
    "WeightedCounts",
    "basic_metrics",
    "build_matrix",
    "cost",
    "format_value",
    "group_records",
    "guardrail_check",
    "lint_manifest",
    "load_matrices",
    "lost_evidence_summary",
    "manifest_from_json",
    "matrix_from_json",
    "matrix_to_json",
    "mcc",
    "mcc_from_counts",
    "metric_set",
    "parse_records",
    "partial_counts_of",
    "rank_models",
    "reconstruct_matrix",
    "records_from_matrix",
    "render_distributions",
    "render_ranking",
    "render_table",
    "subsample_distribution",
    "subsample_metric_values",
    "validate_matrix",
    "weighted_counts",
    "wmcc",
]
