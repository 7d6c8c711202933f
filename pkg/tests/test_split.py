from __future__ import annotations

import pytest

from instructkit.corpus import (
    InstructionRecord,
    LabelSource,
    Language,
    Paradigm,
    Provenance,
    TaskSpec,
)
from instructkit.errors import ConfigError, ToolkitError
from instructkit.split import leakage_check, split


def _spec(task_id, dataset_id, paradigm=Paradigm.GEN):
    return TaskSpec(
        task_id=task_id,
        dataset_id=dataset_id,
        paradigm=paradigm,
        language=Language.EN,
        task_description="d",
        prompts=("p",),
        candidate_labels=("a", "b") if paradigm in (Paradigm.CLS, Paradigm.OTHER) else None,
    )


def _record(record_id, task_id, source_ids, lineage=()):
    return InstructionRecord(
        record_id=record_id,
        task_id=task_id,
        task_description="d",
        prompt="p",
        input_text="i",
        output="o",
        candidate_labels=None,
        output_constraints=None,
        provenance=Provenance(tuple(source_ids), tuple(lineage), LabelSource.GOLDEN),
    )


def _corpus(tasks, sizes):
    registry = {}
    records = []
    for (task_id, dataset_id), size in zip(tasks, sizes):
        registry[task_id] = _spec(task_id, dataset_id)
        for i in range(size):
            records.append(_record(f"{task_id}:{i:05d}", task_id, [f"{dataset_id}/{i:06d}"]))
    return registry, records


def test_caps_honored_and_disjoint():
    registry, records = _corpus(
        [("t1", "d1"), ("t2", "d2"), ("t3", "d3")], [700, 300, 900]
    )
    result = split(records, registry, {"t1"}, train_cap=800, test_cap=500, seed=11)
    assert result.manifest["test_counts"] == {"t1": 500}
    assert result.manifest["train_counts"] == {"d2": 300, "d3": 800}
    train_ids = {r.record_id for r in result.train}
    test_ids = {r.record_id for r in result.test}
    assert not train_ids & test_ids
    assert len(train_ids) == len(result.train)  # no duplicates
    assert len(test_ids) == len(result.test)


def test_twelve_tasks_give_six_thousand():
    tasks = [(f"t{i}", f"d{i}") for i in range(12)]
    registry, records = _corpus(tasks, [520] * 12)
    result = split(records, registry, {t for t, _ in tasks}, seed=3)
    assert len(result.test) == 6000
    assert all(count == 500 for count in result.manifest["test_counts"].values())


def test_split_deterministic():
    registry, records = _corpus([("t1", "d1"), ("t2", "d2")], [900, 900])
    a = split(records, registry, {"t1"}, seed=5)
    b = split(records, registry, {"t1"}, seed=5)
    assert [r.record_id for r in a.train] == [r.record_id for r in b.train]
    assert [r.record_id for r in a.test] == [r.record_id for r in b.test]
    c = split(records, registry, {"t1"}, seed=6)
    assert [r.record_id for r in a.test] != [r.record_id for r in c.test]


def test_zero_record_test_task_is_error():
    registry, records = _corpus([("t1", "d1")], [10])
    registry["empty"] = _spec("empty", "d-empty")
    with pytest.raises(ToolkitError, match="zero records"):
        split(records, registry, {"empty"}, seed=1)


def test_unknown_test_task_is_config_error():
    registry, records = _corpus([("t1", "d1")], [10])
    with pytest.raises(ConfigError, match="unknown test tasks"):
        split(records, registry, {"ghost"}, seed=1)


def test_test_dataset_fully_withheld_from_train():
    # d1 owns the test task t1 and a sibling task t1b; neither may train.
    registry = {
        "t1": _spec("t1", "d1"),
        "t1b": _spec("t1b", "d1"),
        "t2": _spec("t2", "d2"),
    }
    records = [_record(f"t1:{i}", "t1", [f"d1/{i:06d}"]) for i in range(20)]
    records += [_record(f"t1b:{i}", "t1b", [f"d1/{i:06d}"]) for i in range(20)]
    records += [_record(f"t2:{i}", "t2", [f"d2/{i:06d}"]) for i in range(20)]
    result = split(records, registry, {"t1"}, seed=2)
    assert {r.task_id for r in result.train} == {"t2"}


def test_leakage_planted_derived_record_flagged():
    registry = {
        "t1": _spec("t1", "d1"),
        "t1-derived": _spec("t1-derived", "t1-derived"),
        "t2": _spec("t2", "d2"),
    }
    records = [_record(f"t1:{i}", "t1", [f"d1/{i:06d}"]) for i in range(10)]
    records += [_record(f"t2:{i}", "t2", [f"d2/{i:06d}"]) for i in range(10)]
    # Derived-from-test plant: traces back to d1 via simplify_ner.
    records.append(_record("leak", "t1-derived", ["d1/000003"], lineage=["simplify_ner"]))
    result = split(records, registry, {"t1"}, seed=4)
    leaks = result.manifest["leakage"]
    assert len(leaks) >= 1
    assert {v["record_id"] for v in leaks} == {"leak"}


def test_leakage_disjoint_corpora_clean():
    registry, records = _corpus([("t1", "d1"), ("t2", "d2")], [10, 10])
    result = split(records, registry, {"t1"}, seed=4)
    assert result.manifest["leakage"] == []


def test_pseudo_from_non_test_query_set_is_clean():
    registry = {
        "t1": _spec("t1", "d1"),
        "q-rewrite": _spec("q-rewrite", "q-rewrite"),
    }
    records = [_record(f"t1:{i}", "t1", [f"d1/{i:06d}"]) for i in range(10)]
    records += [
        _record(f"q:{i}", "q-rewrite", [f"queries/{i:06d}"], lineage=["pseudo_label"])
        for i in range(5)
    ]
    result = split(records, registry, {"t1"}, seed=4)
    assert result.manifest["leakage"] == []


def test_leakage_check_direct_source_intersection():
    train = [_record("a", "t-derived", ["d1/000001"], lineage=["reverse"])]
    test = [_record("b", "t1", ["d1/000001"])]
    report = leakage_check(train, test)
    assert not report.clean
    assert report.violations[0].reason == "shared_source_sample"
