"""Record parsing, the referred-back matrix rule, and matrix reconstruction.

Input contracts
---------------
CSV: header row required, columns ``id,gold,prediction[,model[,dataset]]``.
Label tokens are case-insensitive: gold is ``include`` or ``exclude`` (a null
gold label is a hard error, gold standards must be complete); prediction is
``include``, ``exclude``, or ``null``, and an empty prediction cell means
``null``.

JSON records: an array of objects with the same field names. A JSON ``null``
prediction means ``null``.

Confusion-matrix JSON: an object (or array of objects) with keys ``tp``,
``fn``, ``fp``, ``tn`` and optional ``referred_back_gold_positive``,
``referred_back_gold_negative`` (default 0), ``model``, ``dataset``.
"""

from __future__ import annotations

import csv
import io
import json
from typing import IO, Iterable

from .model import (
    ConfusionMatrix,
    GoldLabel,
    LabeledRecord,
    PartialCounts,
    RawPrediction,
    validate_matrix,
)


class IngestError(ValueError):
    """An input file violates its format contract."""


class MalformedRowError(IngestError):
    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


class UnknownLabelTokenError(IngestError):
    def __init__(self, token: object, row: int, field: str):
        super().__init__(f"row {row}: unknown {field} token {token!r}")
        self.token = token
        self.row = row


class DuplicateIdError(IngestError):
    def __init__(self, record_id: str, model: str | None, dataset: str | None):
        super().__init__(
            f"duplicate id {record_id!r} within group "
            f"(model={model!r}, dataset={dataset!r})"
        )
        self.record_id = record_id


class MixedGroupsError(IngestError):
    """Records from more than one (model, dataset) group were mixed."""


class InconsistentCountsError(IngestError):
    """Partial counts imply a negative confusion-matrix cell."""


_HEADER = ("id", "gold", "prediction", "model", "dataset")
_GOLD_TOKENS = {"include": GoldLabel.POSITIVE, "exclude": GoldLabel.NEGATIVE}
_PREDICTION_TOKENS = {
    "include": RawPrediction.INCLUDE,
    "exclude": RawPrediction.EXCLUDE,
    "null": RawPrediction.NULL,
    "": RawPrediction.NULL,
}

GroupKey = tuple[str | None, str | None]


def _as_text(source: str | bytes | IO) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    if isinstance(data, bytes):
        return data.decode("utf-8")
    return data


def parse_records(
    source: str | bytes | IO, fmt: str = "csv"
) -> dict[GroupKey, list[LabeledRecord]]:
    """Parse labeled records and group them by (model, dataset).

    Groups are returned in sorted key order; ids must be unique within a
    group. Raises MalformedRowError, UnknownLabelTokenError, or
    DuplicateIdError on contract violations.
    """
    text = _as_text(source)
    if fmt == "csv":
        records = _parse_csv(text)
    elif fmt == "json":
        records = _parse_json(text)
    else:
        raise ValueError(f"unknown record format {fmt!r} (expected csv or json)")
    return group_records(records)


def group_records(records: Iterable[LabeledRecord]) -> dict[GroupKey, list[LabeledRecord]]:
    """Group records by (model, dataset), rejecting duplicate ids per group."""
    groups: dict[GroupKey, list[LabeledRecord]] = {}
    seen: dict[GroupKey, set[str]] = {}
    for record in records:
        key = (record.model, record.dataset)
        ids = seen.setdefault(key, set())
        if record.id in ids:
            raise DuplicateIdError(record.id, record.model, record.dataset)
        ids.add(record.id)
        groups.setdefault(key, []).append(record)
    return {key: groups[key] for key in sorted(groups, key=lambda k: (k[0] or "", k[1] or ""))}


def _record_from_fields(fields: dict[str, str], row: int) -> LabeledRecord:
    record_id = fields.get("id", "")
    if not record_id:
        raise MalformedRowError(row, "empty id")
    gold_token = fields.get("gold", "")
    gold = _GOLD_TOKENS.get(gold_token.strip().lower())
    if gold is None:
        raise UnknownLabelTokenError(gold_token, row, field="gold")
    prediction_token = fields.get("prediction", "")
    prediction = _PREDICTION_TOKENS.get(prediction_token.strip().lower())
    if prediction is None:
        raise UnknownLabelTokenError(prediction_token, row, field="prediction")
    return LabeledRecord(
        id=record_id,
        gold=gold,
        prediction=prediction,
        model=fields.get("model") or None,
        dataset=fields.get("dataset") or None,
    )


def _parse_csv(text: str) -> list[LabeledRecord]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedRowError(1, "missing header row") from None
    columns = tuple(cell.strip().lower() for cell in header)
    if not (3 <= len(columns) <= 5) or columns != _HEADER[: len(columns)]:
        raise MalformedRowError(
            reader.line_num,
            "header must be id,gold,prediction[,model[,dataset]], "
            f"got {','.join(header)!r}",
        )
    records = []
    for row in reader:
        if not row:
            continue
        if len(row) != len(columns):
            raise MalformedRowError(
                reader.line_num,
                f"expected {len(columns)} columns, got {len(row)}",
            )
        fields = dict(zip(columns, (cell.strip() for cell in row)))
        records.append(_record_from_fields(fields, reader.line_num))
    return records


def _parse_json(text: str) -> list[LabeledRecord]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedRowError(exc.lineno, f"invalid JSON: {exc.msg}") from exc
    if not isinstance(data, list):
        raise MalformedRowError(1, "expected a JSON array of record objects")
    records = []
    for index, obj in enumerate(data, start=1):
        if not isinstance(obj, dict):
            raise MalformedRowError(index, "record must be a JSON object")
        unknown = set(obj) - set(_HEADER)
        if unknown:
            raise MalformedRowError(index, f"unknown fields {sorted(unknown)}")
        missing = {"id", "gold", "prediction"} - set(obj)
        if missing:
            raise MalformedRowError(index, f"missing fields {sorted(missing)}")
        record_id = obj["id"]
        if isinstance(record_id, int) and not isinstance(record_id, bool):
            record_id = str(record_id)
        if not isinstance(record_id, str):
            raise MalformedRowError(index, "id must be a string")
        gold = obj["gold"]
        gold_token = gold if isinstance(gold, str) else "null" if gold is None else repr(gold)
        prediction = obj["prediction"]
        prediction_token = (
            prediction
            if isinstance(prediction, str)
            else "" if prediction is None else repr(prediction)
        )
        for optional in ("model", "dataset"):
            value = obj.get(optional)
            if value is not None and not isinstance(value, str):
                raise MalformedRowError(index, f"{optional} must be a string or null")
        fields = {
            "id": record_id,
            "gold": gold_token,
            "prediction": prediction_token,
            "model": obj.get("model") or "",
            "dataset": obj.get("dataset") or "",
        }
        records.append(_record_from_fields(fields, index))
    return records


def build_matrix(records: Iterable[LabeledRecord]) -> ConfusionMatrix:
    """Build a confusion matrix from one group of records.

    Null predictions are referred back to human review: the item is treated
    as a positive prediction (tp for a gold positive, fp for a gold negative)
    and the matching referred-back sub-count is incremented. Every record
    lands in exactly one cell; none are dropped.

    Raises MixedGroupsError if records span several (model, dataset) groups.
    """
    tp = fn = fp = tn = rb_pos = rb_neg = 0
    group: GroupKey | None = None
    for record in records:
        key = (record.model, record.dataset)
        if group is None:
            group = key
        elif key != group:
            raise MixedGroupsError(
                f"records mix groups {group!r} and {key!r}; build one matrix per group"
            )
        if record.gold is GoldLabel.POSITIVE:
            if record.prediction is RawPrediction.INCLUDE:
                tp += 1
            elif record.prediction is RawPrediction.EXCLUDE:
                fn += 1
            else:
                tp += 1
                rb_pos += 1
        else:
            if record.prediction is RawPrediction.INCLUDE:
                fp += 1
            elif record.prediction is RawPrediction.EXCLUDE:
                tn += 1
            else:
                fp += 1
                rb_neg += 1
    return ConfusionMatrix(
        tp=tp,
        fn=fn,
        fp=fp,
        tn=tn,
        referred_back_gold_positive=rb_pos,
        referred_back_gold_negative=rb_neg,
    )


def records_from_matrix(
    cm: ConfusionMatrix,
    model: str | None = None,
    dataset: str | None = None,
    id_prefix: str = "r",
) -> list[LabeledRecord]:
    """Expand a matrix into an equivalent record population.

    Inverse of build_matrix up to record ids: feeding the result back through
    build_matrix returns the original matrix.
    """
    validate_matrix(cm)
    cells = (
        (cm.tp - cm.referred_back_gold_positive, GoldLabel.POSITIVE, RawPrediction.INCLUDE),
        (cm.referred_back_gold_positive, GoldLabel.POSITIVE, RawPrediction.NULL),
        (cm.fn, GoldLabel.POSITIVE, RawPrediction.EXCLUDE),
        (cm.fp - cm.referred_back_gold_negative, GoldLabel.NEGATIVE, RawPrediction.INCLUDE),
        (cm.referred_back_gold_negative, GoldLabel.NEGATIVE, RawPrediction.NULL),
        (cm.tn, GoldLabel.NEGATIVE, RawPrediction.EXCLUDE),
    )
    records = []
    counter = 0
    for count, gold, prediction in cells:
        for _ in range(count):
            counter += 1
            records.append(
                LabeledRecord(
                    id=f"{id_prefix}{counter:06d}",
                    gold=gold,
                    prediction=prediction,
                    model=model,
                    dataset=dataset,
                )
            )
    return records


def reconstruct_matrix(partial: PartialCounts) -> ConfusionMatrix:
    """Derive the full matrix from gold totals plus the true-negative count.

    With N gold negatives, P gold positives, n predicted negatives, and TN
    true negatives:

        fp = N - TN
        fn = n - TN
        tp = P - fn

    Raises InconsistentCountsError if any input or derived cell is negative.
    """
    for name in ("gold_negatives", "gold_positives", "predicted_negatives", "true_negatives"):
        value = getattr(partial, name)
        if value < 0:
            raise InconsistentCountsError(f"{name} must be >= 0, got {value}")
    fp = partial.gold_negatives - partial.true_negatives
    if fp < 0:
        raise InconsistentCountsError(
            f"true negatives ({partial.true_negatives}) exceed "
            f"gold negatives ({partial.gold_negatives})"
        )
    fn = partial.predicted_negatives - partial.true_negatives
    if fn < 0:
        raise InconsistentCountsError(
            f"true negatives ({partial.true_negatives}) exceed "
            f"predicted negatives ({partial.predicted_negatives})"
        )
    tp = partial.gold_positives - fn
    if tp < 0:
        raise InconsistentCountsError(
            f"derived false negatives ({fn}) exceed "
            f"gold positives ({partial.gold_positives})"
        )
    return validate_matrix(
        ConfusionMatrix(tp=tp, fn=fn, fp=fp, tn=partial.true_negatives)
    )


def partial_counts_of(cm: ConfusionMatrix) -> PartialCounts:
    """Partial counts of a matrix; right inverse of reconstruct_matrix."""
    return PartialCounts(
        gold_negatives=cm.gold_negatives,
        gold_positives=cm.gold_positives,
        predicted_negatives=cm.fn + cm.tn,
        true_negatives=cm.tn,
    )


_MATRIX_REQUIRED = ("tp", "fn", "fp", "tn")
_MATRIX_OPTIONAL = (
    "referred_back_gold_positive",
    "referred_back_gold_negative",
    "model",
    "dataset",
)


def matrix_from_json(obj: dict) -> tuple[str | None, str | None, ConfusionMatrix]:
    """Parse one confusion-matrix JSON object into (model, dataset, matrix)."""
    if not isinstance(obj, dict):
        raise IngestError("confusion matrix must be a JSON object")
    unknown = set(obj) - set(_MATRIX_REQUIRED) - set(_MATRIX_OPTIONAL)
    if unknown:
        raise IngestError(f"unknown confusion-matrix fields {sorted(unknown)}")
    missing = set(_MATRIX_REQUIRED) - set(obj)
    if missing:
        raise IngestError(f"missing confusion-matrix fields {sorted(missing)}")
    counts = {}
    for key in _MATRIX_REQUIRED + _MATRIX_OPTIONAL[:2]:
        value = obj.get(key, 0)
        if isinstance(value, bool) or not isinstance(value, int):
            raise IngestError(f"{key} must be an integer, got {value!r}")
        counts[key] = value
    for optional in ("model", "dataset"):
        value = obj.get(optional)
        if value is not None and not isinstance(value, str):
            raise IngestError(f"{optional} must be a string or null")
    cm = validate_matrix(ConfusionMatrix(**counts))
    return obj.get("model"), obj.get("dataset"), cm


def load_matrices(text: str | bytes) -> list[tuple[str | None, str | None, ConfusionMatrix]]:
    """Load one matrix object or an array of them from JSON text."""
    try:
        data = json.loads(_as_text(text))
    except json.JSONDecodeError as exc:
        raise IngestError(f"invalid JSON: {exc.msg} (line {exc.lineno})") from exc
    if isinstance(data, dict):
        data = [data]
    if not isinstance(data, list):
        raise IngestError("expected a confusion-matrix object or an array of them")
    return [matrix_from_json(obj) for obj in data]


def matrix_to_json(cm: ConfusionMatrix) -> dict[str, int]:
    """Plain-dict form of a matrix, matching the documented JSON keys."""
    return {
        "tp": cm.tp,
        "fn": cm.fn,
        "fp": cm.fp,
        "tn": cm.tn,
        "referred_back_gold_positive": cm.referred_back_gold_positive,
        "referred_back_gold_negative": cm.referred_back_gold_negative,
    }
