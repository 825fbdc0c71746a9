"""Shared fixtures: the four-model reference benchmark used across tests.

The benchmark is a published four-column comparison of screening LLMs on one
systematic review (matrix cells tp/fn/fp/tn, cost ratio 10), reused as the
golden dataset for metric, ranking, and CLI checks.
"""

from __future__ import annotations

import csv
from pathlib import Path

import pytest

from screenlit import ConfusionMatrix, CostModel, metric_set, records_from_matrix

GOLDEN_MATRICES = {
    "gemma:7b": ConfusionMatrix(tp=0, fn=172, fp=0, tn=4324),
    "llama3-Athene:70b": ConfusionMatrix(tp=47, fn=125, fp=82, tn=4242),
    "llama3.1:8b": ConfusionMatrix(tp=82, fn=90, fp=281, tn=4048),
    "mistral-nemo:12b": ConfusionMatrix(tp=0, fn=172, fp=3, tn=4326),
}


@pytest.fixture
def golden_matrices() -> dict[str, ConfusionMatrix]:
    return dict(GOLDEN_MATRICES)


@pytest.fixture
def w10() -> CostModel:
    return CostModel(weight=10.0)


@pytest.fixture
def golden_results(golden_matrices, w10):
    return {model: metric_set(cm, w10) for model, cm in golden_matrices.items()}


def write_records_csv(
    path: Path, matrices: dict[str, ConfusionMatrix], dataset: str | None = "SR-I"
) -> Path:
    """Expand matrices into a records CSV file with the standard header."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["id", "gold", "prediction", "model", "dataset"])
        for model, cm in matrices.items():
            for record in records_from_matrix(cm, model=model, dataset=dataset):
                writer.writerow(
                    [
                        record.id,
                        record.gold.value,
                        record.prediction.value,
                        record.model,
                        record.dataset or "",
                    ]
                )
    return path


@pytest.fixture(scope="session")
def golden_csv(tmp_path_factory) -> Path:
    path = tmp_path_factory.mktemp("data") / "sr1.csv"
    return write_records_csv(path, GOLDEN_MATRICES)
