"""Run configuration, dataset manifests and task-spec documents (YAML)."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .corpus import Language, Paradigm, ParseRules, RenderRules, TaskSpec
from .errors import ConfigError
from .ingest import DatasetManifest
from .pseudo import ClientConfig
from .filtering import FilterPolicy


def _load_yaml(path: Path):
    if not path.exists():
        raise ConfigError(f"missing config file: {path}")
    with open(path, encoding="utf-8") as fh:
        try:
            return yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc


def yaml_dump(doc) -> str:
    return yaml.safe_dump(doc, sort_keys=True, allow_unicode=True, default_flow_style=False)


def manifest_from_dict(doc: dict) -> DatasetManifest:
    try:
        return DatasetManifest(
            dataset_id=doc["dataset_id"],
            paradigm=Paradigm(doc["paradigm"]),
            language=Language(doc["language"]),
            path=doc["path"],
            adapter=doc["adapter"],
            data_type=doc.get("data_type", "other"),
            labels=tuple(doc["labels"]) if doc.get("labels") else None,
            annotation_kind=doc.get("annotation_kind"),
        )
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad dataset manifest {doc.get('dataset_id', '?')!r}: {exc}") from exc


def load_dataset_manifests(path: Path) -> list[DatasetManifest]:
    doc = _load_yaml(path)
    entries = doc.get("datasets") if isinstance(doc, dict) else doc
    if not isinstance(entries, list):
        raise ConfigError(f"{path}: expected a 'datasets' list")
    return [manifest_from_dict(e) for e in entries]


def task_spec_from_dict(doc: dict) -> TaskSpec:
    try:
        render_rules = RenderRules(**doc.get("render_rules", {}))
        parse_rules = ParseRules(**doc["parse_rules"]) if "parse_rules" in doc else None
        return TaskSpec(
            task_id=doc["task_id"],
            dataset_id=doc["dataset_id"],
            paradigm=Paradigm(doc["paradigm"]),
            language=Language(doc["language"]),
            task_description=doc["task_description"],
            prompts=tuple(doc["prompts"]),
            output_constraints=doc.get("output_constraints"),
            candidate_labels=tuple(doc["candidate_labels"]) if doc.get("candidate_labels") else None,
            render_rules=render_rules,
            parse_rules=parse_rules,
            generalization=doc.get("generalization"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad task spec {doc.get('task_id', '?')!r}: {exc}") from exc


def load_task_specs(tasks_dir: Path) -> dict[str, TaskSpec]:
    if not tasks_dir.is_dir():
        raise ConfigError(f"missing tasks directory: {tasks_dir}")
    registry: dict[str, TaskSpec] = {}
    for path in sorted(tasks_dir.glob("*.yaml")):
        spec = task_spec_from_dict(_load_yaml(path))
        if spec.task_id in registry:
            raise ConfigError(f"duplicate task_id {spec.task_id!r} in {path}")
        registry[spec.task_id] = spec
    if not registry:
        raise ConfigError(f"no task specs found under {tasks_dir}")
    return registry


@dataclass
class RunConfig:
    base_dir: Path
    seed: int
    manifests: list[DatasetManifest]
    registry: dict[str, TaskSpec]
    client: ClientConfig
    cache_path: Path
    policy: FilterPolicy
    test_tasks: set[str] = field(default_factory=set)
    train_cap: int = 800
    test_cap: int = 500
    review_n: int = 200
    skip_test_datasets: bool = True
    raw: dict = field(default_factory=dict)


def load_run_config(path: str | Path, seed_override: int | None = None) -> RunConfig:
    path = Path(path)
    doc = _load_yaml(path)
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: expected a mapping")
    base = path.parent

    manifests = load_dataset_manifests(base / doc.get("datasets", "datasets.yaml"))
    registry = load_task_specs(base / doc.get("tasks", "tasks"))

    pseudo = doc.get("pseudo_label", {})
    try:
        client = ClientConfig(
            endpoint=pseudo.get("endpoint", "builtin-mock"),
            model=pseudo.get("model", "mock-labeler"),
            auth_env=pseudo.get("auth_env"),
            max_retries=int(pseudo.get("max_retries", 3)),
            timeout=float(pseudo.get("timeout", 10.0)),
            max_concurrency=int(pseudo.get("max_concurrency", 1)),
            requests_per_minute=int(pseudo.get("requests_per_minute", 600)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad pseudo_label config: {exc}") from exc

    filter_doc = doc.get("filter", {})
    try:
        policy = FilterPolicy(
            max_input_chars=int(filter_doc.get("max_input_chars", 2048)),
            max_output_chars=int(filter_doc.get("max_output_chars", 1024)),
            reject_empty_output=bool(filter_doc.get("reject_empty_output", True)),
        )
    except ValueError as exc:
        raise ConfigError(f"bad filter config: {exc}") from exc

    split_doc = doc.get("split", {})
    test_tasks = set(split_doc.get("test_tasks", []))
    unknown = test_tasks - set(registry)
    if unknown:
        raise ConfigError(f"split.test_tasks reference unknown tasks: {sorted(unknown)}")

    seed = int(doc.get("seed", 0)) if seed_override is None else seed_override
    return RunConfig(
        base_dir=base,
        seed=seed,
        manifests=manifests,
        registry=registry,
        client=client,
        cache_path=base / pseudo.get("cache", "cache/pseudo_cache.jsonl"),
        policy=policy,
        test_tasks=test_tasks,
        train_cap=int(split_doc.get("train_cap", 800)),
        test_cap=int(split_doc.get("test_cap", 500)),
        review_n=int(doc.get("review_sample", {}).get("n", 200)),
        skip_test_datasets=bool(doc.get("forge", {}).get("skip_test_datasets", True)),
        raw=doc,
    )
