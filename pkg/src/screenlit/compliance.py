"""Report linting against the evaluation-practice rule registry.

Rules target how screening-classifier evaluations are reported. Violations
the registry marks ``error`` make a report misleading or unusable for
reanalysis (wrong primary metric, missing confusion matrices, undeclared
null handling, unaddressed leakage); ``warning`` covers advisory practice
(uncertainty reporting, baselines, predeclared thresholds).

Two distinct recommendations share the number R9 upstream; the registry
keys them ``R9-baseline`` (compare against non-LLM baselines, a lint rule)
and ``R9-escalate`` (escalate to humans when lost evidence exceeds the
declared threshold, enforced by guardrail_check rather than by lint).
Policymaker-facing variants of these rules restate the same requirements at
the mandate level and are not separate lints.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import MetricSet, MetricValue

SEVERITY_ERROR = "error"
SEVERITY_WARNING = "warning"

STUDY_DESIGNS = ("prospective", "retrospective", "benchmark")
UNCERTAINTY_METHODS = ("subsample_without_replacement", "other", "none")

# Metrics that must never serve as the primary metric: both track raw
# agreement, which rewards rejecting everything on imbalanced data.
CHANCE_UNCORRECTED = frozenset({"accuracy", "pabak"})


@dataclass(frozen=True)
class Rule:
    rule_id: str
    severity: str
    summary: str


RULE_REGISTRY: dict[str, Rule] = {
    rule.rule_id: rule
    for rule in (
        Rule("R1", SEVERITY_ERROR,
             "Report lost evidence (or recall), MCC, and weighted MCC with a "
             "declared FN:FP cost ratio; never accuracy or PABAK as the primary metric."),
        Rule("R2", SEVERITY_WARNING,
             "Base comparative conclusions on cost-sensitive analysis, not on "
             "recall alone (informational, no automated check)."),
        Rule("R3", SEVERITY_WARNING,
             "Predeclare a maximum acceptable lost-evidence threshold."),
        Rule("R4", SEVERITY_ERROR,
             "Publish the complete confusion matrix for every model and dataset."),
        Rule("R5", SEVERITY_WARNING,
             "Report uncertainty per metric; for validation samples use "
             "subsampling without replacement."),
        Rule("R6", SEVERITY_ERROR,
             "Declare how null or otherwise unclassifiable outputs were handled."),
        Rule("R7", SEVERITY_WARNING,
             "Release open artifacts: prompts, seeds, code, and data "
             "(informational, no automated check)."),
        Rule("R8", SEVERITY_ERROR,
             "Use a prospective design, or state contamination/leakage risks explicitly."),
        Rule("R9-baseline", SEVERITY_WARNING,
             "Compare against at least one non-LLM baseline."),
        Rule("R9-escalate", SEVERITY_ERROR,
             "Escalate to human review when lost evidence exceeds the declared "
             "threshold (enforced by guardrail_check)."),
    )
}


class ManifestError(ValueError):
    """An evaluation manifest is malformed or violates its invariants."""


@dataclass(frozen=True)
class EvaluationManifest:
    """What an evaluation report declares about itself."""

    metrics_reported: frozenset[str]
    primary_metric: str
    confusion_matrices_included: bool = False
    cost_ratio_declared: float | None = None
    uncertainty_method: str | None = None
    null_handling_declared: bool = False
    leakage_statement_present: bool = False
    non_llm_baseline_present: bool = False
    lost_evidence_threshold: float | None = None
    study_design: str = "retrospective"

    def __post_init__(self) -> None:
        object.__setattr__(self, "metrics_reported", frozenset(self.metrics_reported))
        if self.primary_metric not in self.metrics_reported:
            raise ManifestError(
                f"primary_metric {self.primary_metric!r} is not in metrics_reported"
            )
        if self.study_design not in STUDY_DESIGNS:
            raise ManifestError(
                f"study_design must be one of {STUDY_DESIGNS}, got {self.study_design!r}"
            )
        if self.uncertainty_method is not None and self.uncertainty_method not in UNCERTAINTY_METHODS:
            raise ManifestError(
                f"uncertainty_method must be one of {UNCERTAINTY_METHODS}, "
                f"got {self.uncertainty_method!r}"
            )
        if self.cost_ratio_declared is not None and not self.cost_ratio_declared > 0:
            raise ManifestError("cost_ratio_declared must be positive")
        if self.lost_evidence_threshold is not None and not (
            0 <= self.lost_evidence_threshold <= 1
        ):
            raise ManifestError("lost_evidence_threshold must be within [0, 1]")


_MANIFEST_FIELDS = {
    "metrics_reported",
    "primary_metric",
    "confusion_matrices_included",
    "cost_ratio_declared",
    "uncertainty_method",
    "null_handling_declared",
    "leakage_statement_present",
    "non_llm_baseline_present",
    "lost_evidence_threshold",
    "study_design",
}


def manifest_from_json(data: dict) -> EvaluationManifest:
    """Build a manifest from a parsed JSON document with the exact field names."""
    if not isinstance(data, dict):
        raise ManifestError("manifest must be a JSON object")
    unknown = set(data) - _MANIFEST_FIELDS
    if unknown:
        raise ManifestError(f"unknown manifest fields {sorted(unknown)}")
    missing = {"metrics_reported", "primary_metric", "study_design"} - set(data)
    if missing:
        raise ManifestError(f"missing manifest fields {sorted(missing)}")
    metrics_reported = data["metrics_reported"]
    if not isinstance(metrics_reported, list) or not all(
        isinstance(name, str) for name in metrics_reported
    ):
        raise ManifestError("metrics_reported must be an array of metric names")
    for flag in (
        "confusion_matrices_included",
        "null_handling_declared",
        "leakage_statement_present",
        "non_llm_baseline_present",
    ):
        if flag in data and not isinstance(data[flag], bool):
            raise ManifestError(f"{flag} must be a boolean")
    for number in ("cost_ratio_declared", "lost_evidence_threshold"):
        value = data.get(number)
        if value is not None and isinstance(value, bool):
            raise ManifestError(f"{number} must be a number")
        if value is not None and not isinstance(value, (int, float)):
            raise ManifestError(f"{number} must be a number")
    if not isinstance(data["primary_metric"], str):
        raise ManifestError("primary_metric must be a string")
    return EvaluationManifest(
        metrics_reported=frozenset(name.lower() for name in metrics_reported),
        primary_metric=data["primary_metric"].lower(),
        confusion_matrices_included=data.get("confusion_matrices_included", False),
        cost_ratio_declared=data.get("cost_ratio_declared"),
        uncertainty_method=data.get("uncertainty_method"),
        null_handling_declared=data.get("null_handling_declared", False),
        leakage_statement_present=data.get("leakage_statement_present", False),
        non_llm_baseline_present=data.get("non_llm_baseline_present", False),
        lost_evidence_threshold=data.get("lost_evidence_threshold"),
        study_design=data["study_design"],
    )


@dataclass(frozen=True)
class LintFinding:
    rule_id: str
    severity: str
    message: str


def _finding(rule_id: str, message: str) -> LintFinding:
    return LintFinding(rule_id=rule_id, severity=RULE_REGISTRY[rule_id].severity, message=message)


def lint_manifest(manifest: EvaluationManifest) -> list[LintFinding]:
    """Deterministic findings for one manifest, in stable rule-id order."""
    findings = []
    reported = manifest.metrics_reported
    if manifest.primary_metric in CHANCE_UNCORRECTED:
        findings.append(_finding(
            "R1",
            f"primary metric is {manifest.primary_metric!r}; accuracy and PABAK "
            "reward rejecting everything on imbalanced data and must not be "
            "primary metrics",
        ))
    core_missing = []
    if not reported & {"recall", "lost_evidence"}:
        core_missing.append("lost_evidence (or recall)")
    if "mcc" not in reported:
        core_missing.append("mcc")
    if "wmcc" not in reported:
        core_missing.append("wmcc")
    if core_missing:
        findings.append(_finding(
            "R1",
            "core metrics missing from the report: " + ", ".join(core_missing),
        ))
    if "wmcc" in reported and manifest.cost_ratio_declared is None:
        findings.append(_finding(
            "R1",
            "weighted MCC is reported without declaring the FN:FP cost ratio it uses",
        ))
    if manifest.lost_evidence_threshold is None:
        findings.append(_finding(
            "R3",
            "no maximum acceptable lost-evidence threshold was predeclared",
        ))
    if not manifest.confusion_matrices_included:
        findings.append(_finding(
            "R4",
            "complete confusion matrices are not included; readers cannot "
            "recompute metrics or run cost-benefit analyses",
        ))
    if (manifest.uncertainty_method or "none") == "none":
        findings.append(_finding(
            "R5",
            "no uncertainty estimates are reported for the metrics",
        ))
    if not manifest.null_handling_declared:
        findings.append(_finding(
            "R6",
            "the rule for handling null or unclassifiable outputs is not declared",
        ))
    if manifest.study_design != "prospective" and not manifest.leakage_statement_present:
        findings.append(_finding(
            "R8",
            f"{manifest.study_design} design without an explicit "
            "contamination/leakage statement",
        ))
    if not manifest.non_llm_baseline_present:
        findings.append(_finding(
            "R9-baseline",
            "no non-LLM baseline is included for comparison",
        ))
    return findings


@dataclass(frozen=True)
class GuardrailResult:
    """Outcome of the lost-evidence guardrail."""

    passed: bool
    actual: MetricValue
    threshold: float


def guardrail_check(ms: MetricSet, threshold: float) -> GuardrailResult:
    """Pass iff lost evidence is defined and does not exceed the threshold.

    An undefined lost evidence fails: with no gold positives the sample says
    nothing about how much evidence the classifier loses.
    """
    if not 0 <= threshold <= 1:
        raise ValueError(f"threshold must be within [0, 1], got {threshold}")
    actual = ms.lost_evidence
    passed = actual is not None and actual <= threshold
    return GuardrailResult(passed=passed, actual=actual, threshold=threshold)


def findings_to_json(findings: list[LintFinding]) -> list[dict[str, str]]:
    return [
        {"rule_id": f.rule_id, "severity": f.severity, "message": f.message}
        for f in findings
    ]


def has_errors(findings: list[LintFinding]) -> bool:
    return any(f.severity == SEVERITY_ERROR for f in findings)
