"""End-to-end pipeline: ingest -> forge -> pseudo-label -> render -> filter -> split.

Each stage is a plain function over in-memory values plus a writer into the
run directory, so the CLI can run them standalone on prior stage output.
Reruns with identical inputs and seed produce byte-identical run
directories (no wall-clock content is ever written there).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import __version__
from .config import RunConfig, yaml_dump
from .corpus import (
    InstructionRecord,
    RawSample,
    record_to_dict,
    sample_to_dict,
    write_jsonl,
)
from .errors import ConfigError, ToolkitError
from .filtering import (
    HeuristicJudge,
    model_filter,
    normalize_record,
    rule_filter,
    sample_review_manifest,
)
from .forge import (
    PSEUDO_LABEL,
    RECOMBINE,
    REVERSE,
    SIMPLIFY_NER,
    ReversalSpec,
    TransformPlan,
    plan_atomic_tasks,
    recombine_matching,
    reverse_task,
    simplify_ner,
)
from .ingest import DatasetRegistry, load_samples
from .mockserver import MockChatServer
from .pseudo import ClientConfig, PseudoCache, generate_pseudo_labels
from .render import choose_prompt, render
from .seeding import derive_seed
from .split import split as split_records


def _guard(stage: str, fn, *args, **kwargs):
    """Attach the stage name to failures; config errors pass through."""
    try:
        return fn(*args, **kwargs)
    except ConfigError:
        raise
    except ToolkitError as exc:
        raise ToolkitError(f"stage {stage} failed: {exc}") from exc


@dataclass
class StageReport:
    name: str
    counts: dict = field(default_factory=dict)
    log_only: dict = field(default_factory=dict)


@dataclass
class RunReport:
    out_dir: Path
    stages: list[StageReport] = field(default_factory=list)

    def stage(self, name: str, log_only: dict | None = None, **counts) -> None:
        self.stages.append(StageReport(name, dict(counts), log_only or {}))


def _config_digest(config_path: Path) -> str:
    return hashlib.sha256(config_path.read_bytes()).hexdigest()


# --- stage: ingest ---


def stage_ingest(cfg: RunConfig) -> tuple[list[RawSample], dict]:
    registry = DatasetRegistry()
    for manifest in cfg.manifests:
        registry.register(manifest)
    samples: list[RawSample] = []
    per_dataset: dict[str, int] = {}
    errors = 0
    for handle in registry.handles():
        result = load_samples(handle, cfg.base_dir)
        samples.extend(result.samples)
        per_dataset[handle.manifest.dataset_id] = len(result.samples)
        errors += result.error_count
    return samples, {"datasets": per_dataset, "errors": errors}


# --- stage: forge ---


def _test_dataset_ids(cfg: RunConfig) -> set[str]:
    return {cfg.registry[t].dataset_id for t in cfg.test_tasks}


def stage_forge(
    cfg: RunConfig, samples: list[RawSample]
) -> tuple[list[RawSample], list[TransformPlan], dict]:
    """Apply golden-label transforms; pseudo-label steps stay in the plan
    for the next stage. Datasets owning a test task are skipped to keep
    derived tasks from leaking test sources into training."""
    by_dataset: dict[str, list[RawSample]] = {}
    for sample in samples:
        by_dataset.setdefault(sample.dataset_id, []).append(sample)

    skip = _test_dataset_ids(cfg) if cfg.skip_test_datasets else set()
    plans: list[TransformPlan] = []
    derived: list[RawSample] = []
    diagnostics: list[str] = []
    for manifest in sorted(cfg.manifests, key=lambda m: m.dataset_id):
        if manifest.dataset_id in skip:
            diagnostics.append(f"{manifest.dataset_id}: owns a test task, transforms skipped")
            continue
        plan = plan_atomic_tasks(manifest)
        if not plan.steps:
            continue
        plans.append(plan)
        members = by_dataset.get(manifest.dataset_id, [])
        ner_ids: dict[str, str] = {}
        for step in plan.steps:
            params = dict(step.params)
            if step.transform == SIMPLIFY_NER:
                ner_ids[params["part"]] = step.derived_task_id
            elif step.transform == REVERSE:
                direction = ReversalSpec(derived_dataset_id=step.derived_task_id)
                for sample in members:
                    derived.append(reverse_task(sample, direction))
            elif step.transform == RECOMBINE:
                out, diags = recombine_matching(
                    members,
                    derive_seed(cfg.seed, "forge", step.derived_task_id),
                    derived_dataset_id=step.derived_task_id,
                )
                derived.extend(out)
                diagnostics.extend(diags.messages)
            elif step.transform == PSEUDO_LABEL:
                pass  # handled by the pseudo-label stage
        if ner_ids:
            for sample in members:
                derived.extend(
                    simplify_ner(
                        sample,
                        detection_dataset_id=ner_ids["detection"],
                        typing_dataset_id=ner_ids["typing"],
                    )
                )
    return derived, plans, {"derived": len(derived), "diagnostics": diagnostics}


# --- stage: pseudo-label ---


def stage_pseudo(
    cfg: RunConfig,
    source_samples: list[RawSample],
    plans: list[TransformPlan],
    *,
    client: ClientConfig | None = None,
    cache: PseudoCache | None = None,
    transport=None,
) -> tuple[list[RawSample], dict]:
    by_dataset: dict[str, list[RawSample]] = {}
    for sample in source_samples:
        by_dataset.setdefault(sample.dataset_id, []).append(sample)

    client = client if client is not None else cfg.client
    cache = cache if cache is not None else PseudoCache(cfg.cache_path)
    labelled: list[RawSample] = []
    counts = {"requests": 0, "cache_hits": 0, "skipped": 0}
    steps = [
        (plan.source_dataset_id, step)
        for plan in sorted(plans, key=lambda p: p.source_dataset_id)
        for step in plan.steps
        if step.transform == PSEUDO_LABEL
    ]
    server: MockChatServer | None = None
    try:
        if steps and client.endpoint == "builtin-mock" and transport is None:
            server = MockChatServer()
            client = replace(client, endpoint=server.start())
        for source_id, step in steps:
            spec = cfg.registry.get(step.derived_task_id)
            if spec is None:
                raise ConfigError(f"no task spec for pseudo-label task {step.derived_task_id}")
            result = generate_pseudo_labels(
                by_dataset.get(source_id, []),
                spec,
                client,
                cache,
                seed=derive_seed(cfg.seed, "pseudo", step.derived_task_id),
                transport=transport,
            )
            labelled.extend(result.samples)
            counts["requests"] += result.requests_made
            counts["cache_hits"] += result.cache_hits
            counts["skipped"] += result.skipped_failures + result.skipped_empty
    finally:
        if server is not None:
            server.stop()
    counts["labelled"] = len(labelled)
    return labelled, counts


# --- stage: render ---


def stage_render(cfg: RunConfig, samples: list[RawSample]) -> tuple[list[InstructionRecord], dict]:
    by_dataset: dict[str, list[RawSample]] = {}
    for sample in samples:
        by_dataset.setdefault(sample.dataset_id, []).append(sample)
    records: list[InstructionRecord] = []
    per_task: dict[str, int] = {}
    stage_seed = derive_seed(cfg.seed, "render")
    for task_id in sorted(cfg.registry):
        spec = cfg.registry[task_id]
        members = by_dataset.get(spec.dataset_id, [])
        if not members:
            continue
        for sample in members:
            index = choose_prompt(spec, derive_seed(stage_seed, task_id, sample.id))
            records.append(render(sample, spec, index))
        per_task[task_id] = len(members)
    return records, {"records": len(records), "tasks": per_task}


# --- stage: filter ---


def stage_filter(cfg: RunConfig, records: list[InstructionRecord]):
    paradigm_of = {t: s.paradigm for t, s in cfg.registry.items()}
    normalized = [normalize_record(r, paradigm_of[r.task_id]) for r in records]
    kept, verdicts = rule_filter(normalized, cfg.policy)
    judged = model_filter(kept, HeuristicJudge())
    dataset_of = {t: s.dataset_id for t, s in cfg.registry.items()}
    review = sample_review_manifest(
        judged.kept, cfg.review_n, derive_seed(cfg.seed, "review"), dataset_of
    )
    counts = {
        "in": len(records),
        "kept": len(judged.kept),
        "rule_rejected": len(records) - len(kept),
        "model_flagged": len(judged.flagged),
        "judge_diagnostics": len(judged.diagnostics),
    }
    return judged.kept, verdicts, review, counts


# --- stage: split ---


def stage_split(cfg: RunConfig, records: list[InstructionRecord]):
    result = split_records(
        records,
        cfg.registry,
        cfg.test_tasks,
        train_cap=cfg.train_cap,
        test_cap=cfg.test_cap,
        seed=derive_seed(cfg.seed, "split"),
    )
    return result, {"train": len(result.train), "test": len(result.test)}


# --- full run ---


def run_pipeline(
    cfg: RunConfig,
    out_dir: str | Path,
    *,
    config_path: Path | None = None,
    transport=None,
) -> RunReport:
    out = Path(out_dir)
    report = RunReport(out_dir=out)

    # Ingest runs before anything is written: a config pointing at missing
    # inputs fails without leaving a partial run directory behind.
    samples, ingest_counts = stage_ingest(cfg)

    def stage_dir(name: str) -> Path:
        d = out / name
        d.mkdir(parents=True, exist_ok=True)
        return d

    write_jsonl(stage_dir("01_ingest") / "samples.jsonl", map(sample_to_dict, samples))
    report.stage("ingest", samples=len(samples), **ingest_counts)

    derived, plans, forge_counts = _guard("forge", stage_forge, cfg, samples)
    forge_dir = stage_dir("02_forge")
    write_jsonl(forge_dir / "samples.jsonl", map(sample_to_dict, derived))
    (forge_dir / "plans.yaml").write_text(
        yaml_dump({"plans": [p.to_dict() for p in plans]}), encoding="utf-8"
    )
    report.stage("forge", **forge_counts)

    labelled, pseudo_counts = _guard("pseudo-label", stage_pseudo, cfg, samples, plans, transport=transport)
    write_jsonl(stage_dir("03_pseudo") / "samples.jsonl", map(sample_to_dict, labelled))
    # requests / cache_hits depend on cache warmth, not on the inputs; they
    # stay out of the manifest so reruns are byte-identical.
    report.stage(
        "pseudo-label",
        labelled=pseudo_counts["labelled"],
        skipped=pseudo_counts["skipped"],
        log_only={"requests": pseudo_counts["requests"], "cache_hits": pseudo_counts["cache_hits"]},
    )

    records, render_counts = _guard("render", stage_render, cfg, samples + derived + labelled)
    write_jsonl(stage_dir("04_render") / "records.jsonl", map(record_to_dict, records))
    report.stage("render", **render_counts)

    kept, verdicts, review, filter_counts = _guard("filter", stage_filter, cfg, records)
    filter_dir = stage_dir("05_filter")
    write_jsonl(filter_dir / "records.jsonl", map(record_to_dict, kept))
    write_jsonl(
        filter_dir / "verdicts.jsonl",
        (v.to_dict() for v in sorted(verdicts, key=lambda v: v.record_id)),
    )
    write_jsonl(filter_dir / "review_manifest.jsonl", review)
    report.stage("filter", **filter_counts)

    split_result, split_counts = _guard("split", stage_split, cfg, kept)
    split_dir = stage_dir("06_split")
    write_jsonl(split_dir / "train.jsonl", map(record_to_dict, split_result.train))
    write_jsonl(split_dir / "test.jsonl", map(record_to_dict, split_result.test))
    (split_dir / "split.yaml").write_text(yaml_dump(split_result.manifest), encoding="utf-8")
    report.stage("split", **split_counts)

    manifest = {
        "version": __version__,
        "seed": cfg.seed,
        "config_sha256": _config_digest(config_path) if config_path else None,
        "stages": {s.name: s.counts for s in report.stages},
    }
    (out / "manifest.yaml").write_text(yaml_dump(manifest), encoding="utf-8")
    return report
