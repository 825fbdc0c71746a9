import csv
import io
import json

import pytest

from screenlit import ConfusionMatrix
from screenlit.cli import main

from conftest import GOLDEN_MATRICES, write_records_csv


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def cm_json(tmp_path):
    path = tmp_path / "matrices.json"
    payload = [
        {"model": model, "dataset": "SR-I", "tp": cm.tp, "fn": cm.fn,
         "fp": cm.fp, "tn": cm.tn}
        for model, cm in GOLDEN_MATRICES.items()
    ]
    path.write_text(json.dumps(payload))
    return path


@pytest.fixture
def small_csv(tmp_path):
    # 400-record population, one model, kept small so subsample runs fast
    path = tmp_path / "val.csv"
    return write_records_csv(
        path, {"m1": ConfusionMatrix(tp=20, fn=20, fp=60, tn=300)}, dataset="VAL"
    )


def _text_row(stdout, label):
    for line in stdout.splitlines():
        if line.startswith(label):
            return [c.strip() for c in line[len(label):].split("  ") if c.strip()]
    raise AssertionError(f"row {label!r} not found in output")


def test_evaluate_csv_reproduces_reference_values(capsys, golden_csv):
    code, out, err = run(
        capsys, "evaluate", "--input", str(golden_csv), "--weight", "10",
        "--format", "text", "--decimals", "2",
    )
    assert code == 0
    assert _text_row(out, "Accuracy") == ["96.17%*", "95.40%", "91.76%", "96.11%"]
    assert _text_row(out, "Cost") == ["1720", "1332", "1181*", "1723"]
    assert _text_row(out, "Weighted MCC") == ["NaN", "0.40", "0.48*", "-0.01"]


def test_evaluate_markdown(capsys, golden_csv):
    code, out, _ = run(
        capsys, "evaluate", "--input", str(golden_csv), "--format", "markdown"
    )
    assert code == 0
    assert out.startswith("| Metric |")
    assert "| 0.481* |" in out


def test_evaluate_cm_json(capsys, cm_json):
    code, out, _ = run(
        capsys, "evaluate", "--cm", str(cm_json), "--weight", "10", "--decimals", "2"
    )
    assert code == 0
    assert _text_row(out, "MCC") == ["NaN", "0.29*", "0.29*", "-0.01"]


def test_evaluate_weight_one_mcc_equals_wmcc(capsys, cm_json):
    code, out, _ = run(
        capsys, "evaluate", "--cm", str(cm_json), "--weight", "1", "--decimals", "6"
    )
    assert code == 0
    assert _text_row(out, "MCC") == _text_row(out, "Weighted MCC")


def test_evaluate_json_format(capsys, cm_json):
    code, out, _ = run(capsys, "evaluate", "--cm", str(cm_json), "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert [entry["model"] for entry in payload] == sorted(GOLDEN_MATRICES)
    assert payload[0]["mcc"] is None  # gemma:7b, NaN as null


def test_evaluate_csv_format(capsys, cm_json):
    code, out, _ = run(capsys, "evaluate", "--cm", str(cm_json), "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0][0] == "Metric"
    assert len(rows[0]) == 5


def test_evaluate_guardrail_failure_exits_3(capsys, golden_csv):
    code, out, err = run(
        capsys, "evaluate", "--input", str(golden_csv), "--weight", "10",
        "--max-lost-evidence", "0.2",
    )
    assert code == 3
    assert "Accuracy" in out  # the table is still printed
    assert "llama3.1:8b" in err and "guardrail failed" in err
    assert "0.5233" in err and "0.2000" in err


def test_evaluate_guardrail_pass_exits_0(capsys, tmp_path):
    path = write_records_csv(
        tmp_path / "good.csv", {"m": ConfusionMatrix(tp=95, fn=5, fp=10, tn=890)}
    )
    code, _, err = run(
        capsys, "evaluate", "--input", str(path), "--max-lost-evidence", "0.2"
    )
    assert code == 0
    assert err == ""


def test_evaluate_multiple_datasets_sectioned(capsys, tmp_path):
    path = tmp_path / "multi.csv"
    lines = ["id,gold,prediction,model,dataset"]
    for dataset in ("SR-I", "SR-II"):
        lines += [
            f"a,include,include,m,{dataset}",
            f"b,include,exclude,m,{dataset}",
            f"c,exclude,exclude,m,{dataset}",
        ]
    path.write_text("\n".join(lines) + "\n")
    code, out, _ = run(capsys, "evaluate", "--input", str(path))
    assert code == 0
    assert "Dataset: SR-I" in out and "Dataset: SR-II" in out


def test_evaluate_byte_identical_stdout(capsys, golden_csv):
    _, first, _ = run(capsys, "evaluate", "--input", str(golden_csv))
    _, second, _ = run(capsys, "evaluate", "--input", str(golden_csv))
    assert first == second


def test_evaluate_plot_dir(capsys, golden_csv, tmp_path):
    plots = tmp_path / "figs"
    code, _, err = run(
        capsys, "evaluate", "--input", str(golden_csv), "--plot-dir", str(plots)
    )
    assert code == 0
    assert (plots / "lost_evidence.png").exists()
    assert "lost_evidence.png" in err


def test_evaluate_missing_file_exits_1(capsys, tmp_path):
    code, _, err = run(capsys, "evaluate", "--input", str(tmp_path / "nope.csv"))
    assert code == 1
    assert "error" in err.lower()


def test_evaluate_malformed_csv_exits_1(capsys, tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("id,gold,prediction\nx,maybe,include\n")
    code, _, err = run(capsys, "evaluate", "--input", str(path))
    assert code == 1
    assert "maybe" in err


def test_usage_error_exits_1(capsys):
    assert run(capsys, "evaluate")[0] == 1  # neither --input nor --cm
    assert run(capsys, "evaluate", "--input", "a", "--cm", "b")[0] == 1
    assert run(capsys, "nonsense")[0] == 1


def test_reconstruct_reference_column(capsys):
    code, out, _ = run(
        capsys, "reconstruct", "--N", "4329", "--P", "172", "--n", "4138",
        "--TN", "4048",
    )
    assert code == 0
    assert json.loads(out) == {
        "tp": 82, "fn": 90, "fp": 281, "tn": 4048,
        "referred_back_gold_positive": 0, "referred_back_gold_negative": 0,
    }


def test_reconstruct_minimal(capsys):
    code, out, _ = run(
        capsys, "reconstruct", "--N", "1", "--P", "1", "--n", "2", "--TN", "1"
    )
    assert code == 0
    matrix = json.loads(out)
    assert (matrix["tp"], matrix["fn"], matrix["fp"], matrix["tn"]) == (0, 1, 0, 1)


def test_reconstruct_inconsistent_exits_1(capsys):
    code, out, err = run(
        capsys, "reconstruct", "--N", "10", "--P", "5", "--n", "12", "--TN", "11"
    )
    assert code == 1
    assert out == ""
    assert "exceed" in err


def test_reconstruct_output_feeds_evaluate(capsys, tmp_path):
    code, out, _ = run(
        capsys, "reconstruct", "--N", "4329", "--P", "172", "--n", "4138",
        "--TN", "4048",
    )
    path = tmp_path / "cm.json"
    path.write_text(out)
    code, out, _ = run(capsys, "evaluate", "--cm", str(path), "--decimals", "2")
    assert code == 0
    assert "91.76%" in out


def test_subsample_csv_output_and_determinism(capsys, small_csv):
    argv = (
        "subsample", "--input", str(small_csv), "--sizes", "20,80",
        "--iterations", "400", "--seed", "42", "--metric", "wmcc",
        "--weight", "10", "--format", "csv",
    )
    code, first, _ = run(capsys, *argv)
    assert code == 0
    code, second, _ = run(capsys, *argv)
    assert first == second
    rows = list(csv.reader(io.StringIO(first)))
    assert rows[0] == ["size", "statistic", "value"]
    sizes = {row[0] for row in rows[1:]}
    assert sizes == {"20", "80"}
    stats = [row[1] for row in rows[1:11]]
    assert stats == ["mean", "sd", "min", "q05", "q25", "median", "q75", "q95",
                     "max", "undefined_fraction"]


def test_subsample_json_output(capsys, small_csv):
    code, out, _ = run(
        capsys, "subsample", "--input", str(small_csv), "--sizes", "20",
        "--iterations", "200", "--seed", "1", "--metric", "recall", "--format", "json",
    )
    assert code == 0
    payload = json.loads(out)
    assert {entry["statistic"] for entry in payload} >= {"mean", "sd", "median"}


def test_subsample_env_seed_and_override(capsys, small_csv, monkeypatch):
    argv = ("subsample", "--input", str(small_csv), "--sizes", "20",
            "--iterations", "200", "--metric", "recall", "--format", "csv")
    monkeypatch.setenv("SCREENLIT_SEED", "5")
    _, via_env, _ = run(capsys, *argv)
    monkeypatch.delenv("SCREENLIT_SEED")
    _, via_flag, _ = run(capsys, *argv, "--seed", "5")
    assert via_env == via_flag
    monkeypatch.setenv("SCREENLIT_SEED", "5")
    _, overridden, _ = run(capsys, *argv, "--seed", "7")
    _, direct7, _ = run(capsys, *argv, "--seed", "7")
    assert overridden == direct7


def test_subsample_size_exceeds_population_exits_1(capsys, small_csv):
    code, _, err = run(
        capsys, "subsample", "--input", str(small_csv), "--sizes", "100000",
        "--iterations", "10",
    )
    assert code == 1
    assert "exceeds population" in err


def test_subsample_plot_dir(capsys, small_csv, tmp_path):
    plots = tmp_path / "figs"
    code, _, err = run(
        capsys, "subsample", "--input", str(small_csv), "--sizes", "20,80",
        "--iterations", "200", "--seed", "3", "--plot-dir", str(plots),
    )
    assert code == 0
    assert (plots / "subsample_stability_wmcc.png").exists()


def _manifest(tmp_path, **overrides):
    data = {
        "metrics_reported": ["lost_evidence", "recall", "mcc", "wmcc"],
        "primary_metric": "wmcc",
        "confusion_matrices_included": True,
        "cost_ratio_declared": 10,
        "uncertainty_method": "subsample_without_replacement",
        "null_handling_declared": True,
        "leakage_statement_present": True,
        "non_llm_baseline_present": True,
        "lost_evidence_threshold": 0.2,
        "study_design": "prospective",
    }
    data.update(overrides)
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps(data))
    return path


def test_lint_compliant_manifest_exits_0(capsys, tmp_path):
    code, out, _ = run(capsys, "lint", "--manifest", str(_manifest(tmp_path)))
    assert code == 0
    assert out == ""


def test_lint_error_findings_exit_2(capsys, tmp_path):
    path = _manifest(
        tmp_path,
        metrics_reported=["accuracy", "lost_evidence", "recall", "mcc", "wmcc"],
        primary_metric="accuracy",
        confusion_matrices_included=False,
    )
    code, out, _ = run(capsys, "lint", "--manifest", str(path))
    assert code == 2
    lines = out.splitlines()
    assert lines[0].startswith("R1 error:")
    assert lines[1].startswith("R4 error:")
    assert len(lines) == 2


def test_lint_warnings_only_exit_0(capsys, tmp_path):
    path = _manifest(tmp_path, non_llm_baseline_present=False)
    code, out, _ = run(capsys, "lint", "--manifest", str(path))
    assert code == 0
    assert out.startswith("R9-baseline warning:")


def test_lint_json_format(capsys, tmp_path):
    path = _manifest(tmp_path, confusion_matrices_included=False)
    code, out, _ = run(capsys, "lint", "--manifest", str(path), "--format", "json")
    assert code == 2
    payload = json.loads(out)
    assert payload[0]["rule_id"] == "R4"
    assert payload[0]["severity"] == "error"


def test_lint_bad_manifest_exits_1(capsys, tmp_path):
    path = tmp_path / "manifest.json"
    path.write_text("{not json")
    assert run(capsys, "lint", "--manifest", str(path))[0] == 1
    path.write_text(json.dumps({"primary_metric": "mcc"}))
    assert run(capsys, "lint", "--manifest", str(path))[0] == 1


def test_rank_command(capsys, cm_json):
    code, out, _ = run(capsys, "rank", "--cm", str(cm_json), "--key", "wmcc")
    assert code == 0
    assert out.splitlines() == [
        "1. llama3.1:8b  0.481",
        "2. llama3-Athene:70b  0.398",
        "3. mistral-nemo:12b  -0.014",
        "4. gemma:7b  NaN",
    ]


def test_rank_by_cost_json(capsys, cm_json):
    code, out, _ = run(
        capsys, "rank", "--cm", str(cm_json), "--key", "cost", "--format", "json"
    )
    assert code == 0
    payload = json.loads(out)
    assert payload[0] == {"rank": 1, "model": "llama3.1:8b", "cost": 1181.0}
    assert payload[-1]["model"] == "mistral-nemo:12b"


def test_module_entry_point(capsys):
    import subprocess
    import sys

    proc = subprocess.run(
        [sys.executable, "-m", "screenlit", "reconstruct", "--N", "1", "--P", "1",
         "--n", "2", "--TN", "1"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["fn"] == 1


def test_evaluate_empty_records_file_header_only(capsys, tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("id,gold,prediction,model,dataset\n")
    code, out, _ = run(capsys, "evaluate", "--input", str(path))
    assert code == 0
    assert out == "Metric\n"


def test_rank_empty_records_file_exits_1(capsys, tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("id,gold,prediction\n")
    code, _, err = run(capsys, "rank", "--input", str(path))
    assert code == 1
    assert "nothing to rank" in err
