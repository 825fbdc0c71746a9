"""Confusion-matrix metrics, cost weighting, and the aggregate metric set.

Every ratio metric returns None (undefined) instead of raising or faking a
zero when its denominator is empty; degenerate matrices are legal inputs.
No rounding happens here, display precision is a rendering concern.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import ConfusionMatrix, CostModel, MetricSet, MetricValue, validate_matrix


def _ratio(numerator: float, denominator: float) -> MetricValue:
    if denominator == 0:
        return None
    return numerator / denominator


def basic_metrics(cm: ConfusionMatrix) -> dict[str, MetricValue]:
    """Ratio metrics derived from the four cells.

    Returns a dict with keys accuracy, recall, lost_evidence, precision,
    specificity, f1, pabak, where:

        accuracy      = (tp + tn) / n
        recall        = tp / (tp + fn)
        lost_evidence = 1 - recall
        precision     = tp / (tp + fp)
        specificity   = tn / (tn + fp)
        f1            = 2 * precision * recall / (precision + recall)
        pabak         = 2 * accuracy - 1

    f1 is the harmonic mean of precision and recall, undefined whenever
    precision or recall is undefined or both are zero. The closed form
    2tp / (2tp + fp + fn) would instead return 0 for a classifier that never
    predicts positive; the harmonic-mean convention keeps such classifiers
    undefined, matching how they are reported alongside an undefined
    precision.
    """
    accuracy = _ratio(cm.tp + cm.tn, cm.total)
    recall = _ratio(cm.tp, cm.tp + cm.fn)
    precision = _ratio(cm.tp, cm.tp + cm.fp)
    specificity = _ratio(cm.tn, cm.tn + cm.fp)
    lost_evidence = None if recall is None else 1.0 - recall
    pabak = None if accuracy is None else 2.0 * accuracy - 1.0
    if precision is None or recall is None or precision + recall == 0:
        f1: MetricValue = None
    else:
        f1 = 2.0 * precision * recall / (precision + recall)
    return {
        "accuracy": accuracy,
        "recall": recall,
        "lost_evidence": lost_evidence,
        "precision": precision,
        "specificity": specificity,
        "f1": f1,
        "pabak": pabak,
    }


def mcc_from_counts(tp: float, fn: float, fp: float, tn: float) -> MetricValue:
    """Matthews correlation coefficient over (possibly real-valued) counts.

        (tp * tn - fp * fn) / sqrt((tp + fp)(tp + fn)(tn + fp)(tn + fn))

    Undefined (None) when any factor under the root is zero. The result is
    clamped to [-1, 1] to absorb last-bit floating-point overshoot.
    """
    f1_, f2_, f3_, f4_ = tp + fp, tp + fn, tn + fp, tn + fn
    if f1_ == 0 or f2_ == 0 or f3_ == 0 or f4_ == 0:
        return None
    value = (tp * tn - fp * fn) / math.sqrt(f1_ * f2_ * f3_ * f4_)
    return max(-1.0, min(1.0, value))


def mcc(cm: ConfusionMatrix) -> MetricValue:
    """Matthews correlation coefficient of a confusion matrix."""
    return mcc_from_counts(cm.tp, cm.fn, cm.fp, cm.tn)


@dataclass(frozen=True)
class WeightedCounts:
    """Cost-weighted matrix cells; real-valued because weights are."""

    tp: float
    fn: float
    fp: float
    tn: float


def weighted_counts(cm: ConfusionMatrix, cost_model: CostModel) -> WeightedCounts:
    """Apply the positive-class weight to the positive cells.

    tp and fn are multiplied by the weight; tn and fp keep weight 1.
    """
    w = cost_model.weight
    return WeightedCounts(tp=w * cm.tp, fn=w * cm.fn, fp=float(cm.fp), tn=float(cm.tn))


def wmcc(cm: ConfusionMatrix, cost_model: CostModel) -> MetricValue:
    """Weighted MCC: the MCC of the cost-weighted counts.

    Evaluated in simplified form with weight w on the positive cells:

        (w*tp*tn - fp*w*fn) / sqrt((w*tp + fp)(w*tp + w*fn)(tn + fp)(tn + w*fn))

    Undefined (None) when any factor is zero; equals plain MCC when w = 1.
    """
    w = cost_model.weight
    tp, fn, fp, tn = cm.tp, cm.fn, cm.fp, cm.tn
    f1_ = w * tp + fp
    f2_ = w * tp + w * fn
    f3_ = tn + fp
    f4_ = tn + w * fn
    if f1_ == 0 or f2_ == 0 or f3_ == 0 or f4_ == 0:
        return None
    value = (w * tp * tn - fp * w * fn) / math.sqrt(f1_ * f2_ * f3_ * f4_)
    return max(-1.0, min(1.0, value))


def cost(cm: ConfusionMatrix, cost_model: CostModel) -> float:
    """Total misclassification cost: weight * fn + fp."""
    return cost_model.weight * cm.fn + cm.fp


def metric_set(cm: ConfusionMatrix, cost_model: CostModel | None = None) -> MetricSet:
    """All metrics for one matrix under one cost model.

    Validates the matrix first. referral_rate is the fraction of all items
    the classifier referred back to human review (0.0 for an empty matrix).
    """
    validate_matrix(cm)
    if cost_model is None:
        cost_model = CostModel()
    base = basic_metrics(cm)
    total = cm.total
    return MetricSet(
        accuracy=base["accuracy"],
        recall=base["recall"],
        lost_evidence=base["lost_evidence"],
        precision=base["precision"],
        specificity=base["specificity"],
        f1=base["f1"],
        pabak=base["pabak"],
        mcc=mcc(cm),
        wmcc=wmcc(cm, cost_model),
        cost=cost(cm, cost_model),
        referral_rate=(cm.referred_back / total) if total else 0.0,
        total_n=total,
        cost_model=cost_model,
    )
