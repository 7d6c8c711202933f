"""Deterministic train/test partition with per-dataset caps.

Tests sample per task, training samples per dataset; datasets that own a
test task are withheld from training entirely. The leakage check catches
derived training records whose source samples live in a test dataset.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping

from .corpus import InstructionRecord, TaskSpec, root_dataset_id
from .errors import ConfigError, ToolkitError
from .seeding import derive_seed


@dataclass
class SplitResult:
    train: list[InstructionRecord]
    test: list[InstructionRecord]
    manifest: dict


@dataclass
class LeakageViolation:
    record_id: str
    task_id: str
    source_id: str
    reason: str


@dataclass
class LeakageReport:
    violations: list[LeakageViolation] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.violations


def _sample_capped(
    records: list[InstructionRecord], cap: int, rng: random.Random
) -> list[InstructionRecord]:
    ordered = sorted(records, key=lambda r: r.record_id)
    if len(ordered) <= cap:
        return ordered
    return sorted(rng.sample(ordered, cap), key=lambda r: r.record_id)


def split(
    records: list[InstructionRecord],
    registry: Mapping[str, TaskSpec],
    test_task_ids: set[str],
    train_cap: int = 800,
    test_cap: int = 500,
    seed: int = 0,
) -> SplitResult:
    """Partition the corpus; pure in (records, test tasks, caps, seed)."""
    if train_cap <= 0 or test_cap <= 0:
        raise ConfigError("caps must be positive")
    unknown = test_task_ids - set(registry)
    if unknown:
        raise ConfigError(f"unknown test tasks: {sorted(unknown)}")

    by_task: dict[str, list[InstructionRecord]] = {}
    for record in records:
        by_task.setdefault(record.task_id, []).append(record)

    test: list[InstructionRecord] = []
    test_counts: dict[str, int] = {}
    for task_id in sorted(test_task_ids):
        members = by_task.get(task_id, [])
        if not members:
            raise ToolkitError(f"test task {task_id} has zero records")
        rng = random.Random(derive_seed(seed, "split-test", task_id))
        chosen = _sample_capped(members, test_cap, rng)
        test_counts[task_id] = len(chosen)
        test.extend(chosen)

    test_datasets = {registry[t].dataset_id for t in test_task_ids}
    by_dataset: dict[str, list[InstructionRecord]] = {}
    for record in records:
        spec = registry.get(record.task_id)
        if spec is None:
            raise ConfigError(f"record {record.record_id}: no spec for task {record.task_id}")
        if spec.dataset_id in test_datasets:
            continue
        by_dataset.setdefault(spec.dataset_id, []).append(record)

    train: list[InstructionRecord] = []
    train_counts: dict[str, int] = {}
    for dataset_id in sorted(by_dataset):
        rng = random.Random(derive_seed(seed, "split-train", dataset_id))
        chosen = _sample_capped(by_dataset[dataset_id], train_cap, rng)
        train_counts[dataset_id] = len(chosen)
        train.extend(chosen)

    leakage = leakage_check(train, test, registry, test_task_ids)
    manifest = {
        "seed": seed,
        "train_cap": train_cap,
        "test_cap": test_cap,
        "test_tasks": sorted(test_task_ids),
        "test_counts": test_counts,
        "train_counts": train_counts,
        "n_train": len(train),
        "n_test": len(test),
        "leakage": [
            {
                "record_id": v.record_id,
                "task_id": v.task_id,
                "source_id": v.source_id,
                "reason": v.reason,
            }
            for v in leakage.violations
        ],
    }
    return SplitResult(train=train, test=test, manifest=manifest)


def leakage_check(
    train: list[InstructionRecord],
    test: list[InstructionRecord],
    registry: Mapping[str, TaskSpec] | None = None,
    test_task_ids: set[str] | None = None,
) -> LeakageReport:
    """Report training records that trace back to a test dataset's samples.

    Two signals: direct intersection with the source ids behind the test
    records, and (when the registry is available) dataset-prefixed source
    ids pointing into a withheld test dataset.
    """
    test_source_ids = {sid for record in test for sid in record.provenance.source_ids}
    test_datasets: set[str] = set()
    if registry is not None:
        task_ids = test_task_ids if test_task_ids is not None else {r.task_id for r in test}
        test_datasets = {registry[t].dataset_id for t in task_ids if t in registry}

    report = LeakageReport()
    for record in train:
        for sid in record.provenance.source_ids:
            if sid in test_source_ids:
                report.violations.append(
                    LeakageViolation(record.record_id, record.task_id, sid, "shared_source_sample")
                )
                continue
            ds = root_dataset_id(sid)
            if ds is not None and ds in test_datasets:
                report.violations.append(
                    LeakageViolation(record.record_id, record.task_id, sid, "source_in_test_dataset")
                )
    return report
