"""Subsampling without replacement for validation-sample stability.

Repeatedly draws fixed-size subsamples from a labeled population, rebuilds
the confusion matrix per draw, and summarizes the chosen metric's spread per
subsample size. This estimates how stable a metric measured on a validation
sample of that size would be, which is the question that matters when a
sample decides whether a classifier gets deployed on the remaining items.

Sampling is without replacement on purpose: items of one review are neither
independent nor identically distributed, so binomial confidence intervals
and bootstrap (with-replacement) resampling are deliberately not offered.

Reproducibility: each draw seeds its own generator from (master seed, size,
iteration) via numpy's SeedSequence spawn keys, so serial and parallel
execution, in any order, produce identical streams. Records are order
normalized by id before drawing, making results independent of input order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import metrics
from .model import ConfusionMatrix, CostModel, GoldLabel, LabeledRecord, MetricValue, RawPrediction

SUBSAMPLE_METRICS = ("mcc", "wmcc", "recall", "lost_evidence", "accuracy", "cost")


class SizeExceedsPopulationError(ValueError):
    """A planned subsample size is larger than the population."""


@dataclass(frozen=True)
class SubsamplePlan:
    """What to draw and what to measure.

    sizes must be strictly increasing and every size must not exceed the
    population handed to subsample_distribution. The seed is a 64-bit
    unsigned master seed.
    """

    sizes: tuple[int, ...]
    iterations: int = 10_000
    seed: int = 0
    metric: str = "wmcc"
    cost_model: CostModel = CostModel()

    def __post_init__(self) -> None:
        object.__setattr__(self, "sizes", tuple(self.sizes))
        if not self.sizes:
            raise ValueError("sizes must be nonempty")
        if any(size <= 0 for size in self.sizes):
            raise ValueError(f"sizes must be positive, got {self.sizes}")
        if list(self.sizes) != sorted(set(self.sizes)):
            raise ValueError(f"sizes must be strictly increasing, got {self.sizes}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.metric not in SUBSAMPLE_METRICS:
            raise ValueError(
                f"unknown metric {self.metric!r}, expected one of {SUBSAMPLE_METRICS}"
            )


@dataclass(frozen=True)
class SubsampleDistribution:
    """Summary of one metric over all draws of one size.

    Statistics cover defined metric values only; draws where the metric was
    undefined (for example no positives drawn) are counted in
    undefined_fraction. All statistics are NaN if every draw was undefined.
    """

    size: int
    mean: float
    sd: float
    min: float
    max: float
    q05: float
    q25: float
    median: float
    q75: float
    q95: float
    undefined_fraction: float


# Population encoding: one small int per record, gold * 3 + prediction, with
# prediction 0=include, 1=exclude, 2=null. Cheap to slice and bincount.
_PREDICTION_CODE = {
    RawPrediction.INCLUDE: 0,
    RawPrediction.EXCLUDE: 1,
    RawPrediction.NULL: 2,
}


def _encode_population(records: Iterable[LabeledRecord]) -> np.ndarray:
    ordered = sorted(records, key=lambda r: (r.model or "", r.dataset or "", r.id))
    codes = [
        (3 if record.gold is GoldLabel.POSITIVE else 0) + _PREDICTION_CODE[record.prediction]
        for record in ordered
    ]
    return np.asarray(codes, dtype=np.int64)


def _matrix_from_code_counts(counts: np.ndarray) -> ConfusionMatrix:
    # Referred-back (null) items count as positive predictions.
    return ConfusionMatrix(
        tp=int(counts[3] + counts[5]),
        fn=int(counts[4]),
        fp=int(counts[0] + counts[2]),
        tn=int(counts[1]),
        referred_back_gold_positive=int(counts[5]),
        referred_back_gold_negative=int(counts[2]),
    )


def _metric_fn(name: str, cost_model: CostModel) -> Callable[[ConfusionMatrix], MetricValue]:
    if name == "mcc":
        return metrics.mcc
    if name == "wmcc":
        return lambda cm: metrics.wmcc(cm, cost_model)
    if name == "cost":
        return lambda cm: metrics.cost(cm, cost_model)
    return lambda cm: metrics.basic_metrics(cm)[name]


def _draw_indices(population: int, size: int, seed: int, iteration: int) -> np.ndarray:
    """Indices of one subsample, all distinct, from the per-draw generator."""
    sequence = np.random.SeedSequence(seed, spawn_key=(size, iteration))
    rng = np.random.default_rng(sequence)
    return rng.choice(population, size=size, replace=False)


def _iteration_value(
    codes: np.ndarray,
    size: int,
    seed: int,
    iteration: int,
    metric_fn: Callable[[ConfusionMatrix], MetricValue],
) -> MetricValue:
    indices = _draw_indices(codes.shape[0], size, seed, iteration)
    counts = np.bincount(codes[indices], minlength=6)
    return metric_fn(_matrix_from_code_counts(counts))


def _summarize(size: int, values: Sequence[MetricValue], iterations: int) -> SubsampleDistribution:
    defined = np.asarray([v for v in values if v is not None], dtype=float)
    undefined_fraction = 1.0 - defined.size / iterations
    if defined.size == 0:
        nan = float("nan")
        return SubsampleDistribution(
            size=size, mean=nan, sd=nan, min=nan, max=nan,
            q05=nan, q25=nan, median=nan, q75=nan, q95=nan,
            undefined_fraction=1.0,
        )
    if np.ptp(defined) == 0:
        # All draws identical: report the value exactly, spread exactly zero.
        value = float(defined[0])
        return SubsampleDistribution(
            size=size, mean=value, sd=0.0, min=value, max=value,
            q05=value, q25=value, median=value, q75=value, q95=value,
            undefined_fraction=undefined_fraction,
        )
    q05, q25, median, q75, q95 = np.quantile(defined, [0.05, 0.25, 0.5, 0.75, 0.95])
    return SubsampleDistribution(
        size=size,
        mean=float(np.mean(defined)),
        sd=float(np.std(defined, ddof=1)),
        min=float(defined.min()),
        max=float(defined.max()),
        q05=float(q05),
        q25=float(q25),
        median=float(median),
        q75=float(q75),
        q95=float(q95),
        undefined_fraction=float(undefined_fraction),
    )


def subsample_metric_values(
    records: Sequence[LabeledRecord],
    size: int,
    iterations: int,
    seed: int,
    metric: str,
    cost_model: CostModel,
) -> list[MetricValue]:
    """Per-iteration metric values for one size, in iteration order."""
    codes = _encode_population(records)
    if size > codes.shape[0]:
        raise SizeExceedsPopulationError(
            f"subsample size {size} exceeds population of {codes.shape[0]}"
        )
    fn = _metric_fn(metric, cost_model)
    return [_iteration_value(codes, size, seed, i, fn) for i in range(iterations)]


def subsample_distribution(
    records: Sequence[LabeledRecord], plan: SubsamplePlan
) -> list[SubsampleDistribution]:
    """Summaries of the planned metric over subsamples, one per size."""
    codes = _encode_population(records)
    population = codes.shape[0]
    metric_fn = _metric_fn(plan.metric, plan.cost_model)
    out = []
    for size in plan.sizes:
        if size > population:
            raise SizeExceedsPopulationError(
                f"subsample size {size} exceeds population of {population}"
            )
        values = [
            _iteration_value(codes, size, plan.seed, i, metric_fn)
            for i in range(plan.iterations)
        ]
        out.append(_summarize(size, values, plan.iterations))
    return out
