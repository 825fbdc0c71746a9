"""Domain types shared by every other module.

All types are immutable after construction; operations on them are pure
functions, so instances are safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class GoldLabel(Enum):
    """Human reference decision for one screened item."""

    POSITIVE = "include"
    NEGATIVE = "exclude"


class RawPrediction(Enum):
    """Classifier output for one screened item.

    NULL stands for any unclassifiable, empty, or otherwise invalid output.
    """

    INCLUDE = "include"
    EXCLUDE = "exclude"
    NULL = "null"


@dataclass(frozen=True)
class LabeledRecord:
    """One screened item: gold label plus the raw classifier output."""

    id: str
    gold: GoldLabel
    prediction: RawPrediction
    model: str | None = None
    dataset: str | None = None


class MatrixError(ValueError):
    """A confusion matrix violates one of its invariants."""


class NegativeCountError(MatrixError):
    """A matrix cell or referred-back sub-count is negative."""


class ReferredBackExceedsCellError(MatrixError):
    """A referred-back sub-count exceeds the cell that contains it."""


@dataclass(frozen=True)
class ConfusionMatrix:
    """Binary confusion-matrix counts with referred-back sub-counts.

    Items the classifier could not decide on are routed to human review and
    therefore counted as positive predictions: a referred-back gold positive
    is already included in ``tp`` and a referred-back gold negative in ``fp``.
    The sub-counts only record how many of those cells came from referrals;
    no record is ever dropped from the matrix.
    """

    tp: int
    fn: int
    fp: int
    tn: int
    referred_back_gold_positive: int = 0
    referred_back_gold_negative: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fn + self.fp + self.tn

    @property
    def gold_positives(self) -> int:
        return self.tp + self.fn

    @property
    def gold_negatives(self) -> int:
        return self.fp + self.tn

    @property
    def referred_back(self) -> int:
        return self.referred_back_gold_positive + self.referred_back_gold_negative


def validate_matrix(cm: ConfusionMatrix) -> ConfusionMatrix:
    """Check all ConfusionMatrix invariants, returning the matrix unchanged.

    Raises:
        NegativeCountError: any count is negative.
        ReferredBackExceedsCellError: a referred-back sub-count exceeds the
            tp (gold positive) or fp (gold negative) cell holding it.
    """
    for name in (
        "tp",
        "fn",
        "fp",
        "tn",
        "referred_back_gold_positive",
        "referred_back_gold_negative",
    ):
        value = getattr(cm, name)
        if value < 0:
            raise NegativeCountError(f"{name} must be >= 0, got {value}")
    if cm.referred_back_gold_positive > cm.tp:
        raise ReferredBackExceedsCellError(
            f"referred_back_gold_positive ({cm.referred_back_gold_positive}) "
            f"exceeds tp ({cm.tp})"
        )
    if cm.referred_back_gold_negative > cm.fp:
        raise ReferredBackExceedsCellError(
            f"referred_back_gold_negative ({cm.referred_back_gold_negative}) "
            f"exceeds fp ({cm.fp})"
        )
    return cm


@dataclass(frozen=True)
class PartialCounts:
    """Sufficient counts from which the full matrix can be derived.

    Field order mirrors the CLI flags: --N (gold negatives), --P (gold
    positives), --n (predicted negatives), --TN (true negatives).
    """

    gold_negatives: int
    gold_positives: int
    predicted_negatives: int
    true_negatives: int


@dataclass(frozen=True)
class CostModel:
    """Relative cost of a false negative versus a false positive.

    ``weight`` is applied to every positive example (tp and fn cells).
    Screening work normally uses weight >= 1 because a wrongly excluded
    relevant item is far more damaging than a wrongly included one; any
    positive weight is accepted.
    """

    weight: float = 10.0

    def __post_init__(self) -> None:
        if not self.weight > 0:
            raise ValueError(f"weight must be > 0, got {self.weight}")


# A metric value is a float within its metric's range, or None when the
# defining ratio has a zero denominator. None is deliberately not coerced to
# 0.0 or NaN: arithmetic on it fails loudly, rendering emits the token "NaN",
# structured output emits null, and rankings sort it after all defined values.
MetricValue = float | None


@dataclass(frozen=True)
class MetricSet:
    """Every metric computed for one matrix under one cost model."""

    accuracy: MetricValue
    recall: MetricValue
    lost_evidence: MetricValue
    precision: MetricValue
    specificity: MetricValue
    f1: MetricValue
    pabak: MetricValue
    mcc: MetricValue
    wmcc: MetricValue
    cost: float
    referral_rate: float
    total_n: int
    cost_model: CostModel
