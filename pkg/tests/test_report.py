from __future__ import annotations

from pathlib import Path

import pytest
import yaml

from instructkit.corpus import (
    InstructionRecord,
    LabelSource,
    Language,
    Paradigm,
    Provenance,
    TaskSpec,
)
from instructkit.errors import ConfigError
from instructkit.evaluate import PredictionRecord, evaluate_run
from instructkit.report import (
    format_report_table,
    format_stats_table,
    stats_from_counts,
    stats_from_records,
    write_eval_outputs,
    write_stats_outputs,
)

DATA = Path(__file__).parent / "data"


def _spec(task_id, dataset_id, paradigm, language):
    return TaskSpec(
        task_id=task_id,
        dataset_id=dataset_id,
        paradigm=paradigm,
        language=language,
        task_description="d",
        prompts=("p",),
        candidate_labels=("a", "b") if paradigm in (Paradigm.CLS, Paradigm.OTHER) else None,
    )


def _record(record_id, task_id, output="a"):
    return InstructionRecord(
        record_id=record_id,
        task_id=task_id,
        task_description="d",
        prompt="p",
        input_text="i",
        output=output,
        candidate_labels=("a", "b"),
        output_constraints=None,
        provenance=Provenance((record_id,), (), LabelSource.GOLDEN),
    )


def test_stats_fixture_prints_expected_totals():
    with open(DATA / "stats_counts.yaml", encoding="utf-8") as fh:
        table = stats_from_counts(yaml.safe_load(fh))
    total = table.totals()
    assert (total.tasks, total.train, total.test) == (134, 1_533_300, 1_023_076)
    text = format_stats_table(table)
    assert "134" in text and "1,533,300" in text and "1,023,076" in text


def test_stats_counts_sum_mismatch_rejected():
    doc = {
        "EN.CLS": {"tasks": 1, "train": 10, "test": 5},
        "ALL": {"tasks": 2, "train": 10, "test": 5},
    }
    with pytest.raises(ConfigError, match="do not sum"):
        stats_from_counts(doc)


def test_stats_from_records_matches_line_count_oracle():
    registry = {
        "t1": _spec("t1", "d1", Paradigm.CLS, Language.EN),
        "t2": _spec("t2", "d2", Paradigm.GEN, Language.ZH),
        "t3": _spec("t3", "d3", Paradigm.GEN, Language.ZH),
        "t4": _spec("t4", "d4", Paradigm.OTHER, Language.EN),
    }
    train = (
        [_record(f"a{i}", "t1") for i in range(12)]
        + [_record(f"b{i}", "t2") for i in range(8)]
        + [_record(f"c{i}", "t3") for i in range(6)]
    )
    test = [_record(f"d{i}", "t4") for i in range(14)]
    table = stats_from_records(train, test, registry)
    # Independent per-task line counting.
    assert table.cells[("EN", "CLS")].train == 12
    assert table.cells[("ZH", "GEN")].train == 14
    assert table.cells[("ZH", "GEN")].tasks == 2
    assert table.cells[("EN", "OTHER")].test == 14
    total = table.totals()
    assert total.tasks == 4
    assert total.train == len(train)
    assert total.test == len(test)


def test_stats_empty_corpus_all_zero():
    table = stats_from_records([], [], {})
    total = table.totals()
    assert (total.tasks, total.train, total.test) == (0, 0, 0)


def test_stats_outputs_written(tmp_path):
    with open(DATA / "stats_counts.yaml", encoding="utf-8") as fh:
        table = stats_from_counts(yaml.safe_load(fh))
    written = write_stats_outputs(table, tmp_path)
    names = {p.name for p in written}
    assert names == {"stats.json", "stats.txt", "stats.png"}
    assert all(p.exists() and p.stat().st_size > 0 for p in written)


def _toy_report():
    registry = {"t1": _spec("t1", "d1", Paradigm.CLS, Language.EN)}
    gold = [_record("r1", "t1", output="a"), _record("r2", "t1", output="b")]
    predictions = [PredictionRecord("r1", "a"), PredictionRecord("r2", "a")]
    return evaluate_run(predictions, gold, registry)


def test_report_table_contains_rollups():
    text = format_report_table(_toy_report())
    assert "[paradigm]" in text
    assert "[overall]" in text
    assert "t1" in text


def test_eval_outputs_and_figures_written(tmp_path):
    written = write_eval_outputs(_toy_report(), tmp_path)
    names = {p.name for p in written}
    assert "report.json" in names
    assert "report.txt" in names
    assert "rouge_by_task.png" in names
    assert "f1_by_task.png" in names
    assert all(p.stat().st_size > 0 for p in written)


def test_eval_outputs_figures_can_be_disabled(tmp_path):
    written = write_eval_outputs(_toy_report(), tmp_path, figures=False)
    assert {p.name for p in written} == {"report.json", "report.txt"}
