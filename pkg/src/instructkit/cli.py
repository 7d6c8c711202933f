"""Command-line entry points.

Exit codes: 0 success, 1 stage failure, 2 configuration error.
"""

from __future__ import annotations

import sys
from dataclasses import replace
from pathlib import Path

import click
import yaml

from .config import load_run_config, yaml_dump
from .corpus import (
    read_jsonl,
    record_from_dict,
    record_to_dict,
    sample_from_dict,
    sample_to_dict,
    write_jsonl,
)
from .errors import ConfigError, ToolkitError
from .evaluate import PredictionRecord, build_human_eval_manifest, evaluate_run
from .forge import TransformPlan, TransformStep
from .pipeline import (
    run_pipeline,
    stage_filter,
    stage_forge,
    stage_ingest,
    stage_pseudo,
    stage_render,
    stage_split,
)
from .report import (
    format_report_table,
    format_stats_table,
    stats_from_counts,
    stats_from_records,
    write_eval_outputs,
    write_stats_outputs,
)
from .toydata import write_toy_corpus


def _fail(exc: Exception) -> None:
    code = 2 if isinstance(exc, ConfigError) else 1
    click.echo(f"error: {exc}", err=True)
    sys.exit(code)


def _load_config(config, seed, workers):
    cfg = load_run_config(config, seed_override=seed)
    if workers is not None:
        cfg.client = replace(cfg.client, max_concurrency=max(1, workers))
    return cfg


def _read_samples(paths):
    samples = []
    for path in paths:
        samples.extend(sample_from_dict(d) for d in read_jsonl(path))
    return samples


def _read_records(path):
    return [record_from_dict(d) for d in read_jsonl(path)]


def _read_predictions(path):
    return [PredictionRecord(d["record_id"], d["generated"]) for d in read_jsonl(path)]


config_option = click.option(
    "--config", "config", required=True, type=click.Path(path_type=Path), help="Run config YAML."
)
seed_option = click.option("--seed", type=int, default=None, help="Override the config seed.")
workers_option = click.option("--workers", type=int, default=None, help="Cap in-stage parallelism.")
out_option = click.option(
    "--out", "out", required=True, type=click.Path(path_type=Path), help="Output directory."
)


@click.group()
def main() -> None:
    """Build and evaluate instruction-tuning corpora."""


@main.command()
@config_option
@seed_option
@workers_option
@out_option
def run(config: Path, seed, workers, out: Path) -> None:
    """Run the whole pipeline: ingest, forge, pseudo-label, render, filter, split."""
    try:
        cfg = _load_config(config, seed, workers)
        report = run_pipeline(cfg, out, config_path=config)
    except ConfigError as exc:
        _fail(exc)
    except ToolkitError as exc:
        _fail(exc)
    for stage in report.stages:
        extra = dict(stage.counts, **stage.log_only)
        click.echo(f"[{stage.name}] {extra}")
    click.echo(f"run directory: {out}")


@main.command()
@config_option
@seed_option
@out_option
def ingest(config: Path, seed, out: Path) -> None:
    """Load all declared datasets into canonical samples."""
    try:
        cfg = _load_config(config, seed, None)
        samples, counts = stage_ingest(cfg)
    except ToolkitError as exc:
        _fail(exc)
    out.mkdir(parents=True, exist_ok=True)
    write_jsonl(out / "samples.jsonl", map(sample_to_dict, samples))
    click.echo(f"ingested {len(samples)} samples ({counts['errors']} malformed)")


@main.command()
@config_option
@seed_option
@click.option("--samples", "samples_path", required=True, type=click.Path(path_type=Path))
@out_option
def forge(config: Path, seed, samples_path: Path, out: Path) -> None:
    """Derive atomic-task samples from ingested samples."""
    try:
        cfg = _load_config(config, seed, None)
        samples = _read_samples([samples_path])
        derived, plans, counts = stage_forge(cfg, samples)
    except ToolkitError as exc:
        _fail(exc)
    out.mkdir(parents=True, exist_ok=True)
    write_jsonl(out / "samples.jsonl", map(sample_to_dict, derived))
    (out / "plans.yaml").write_text(
        yaml_dump({"plans": [p.to_dict() for p in plans]}), encoding="utf-8"
    )
    click.echo(f"derived {counts['derived']} samples")


@main.command("pseudo-label")
@config_option
@seed_option
@workers_option
@click.option("--samples", "samples_path", required=True, type=click.Path(path_type=Path))
@click.option("--plans", "plans_path", required=True, type=click.Path(path_type=Path))
@out_option
def pseudo_label(config: Path, seed, workers, samples_path: Path, plans_path: Path, out: Path) -> None:
    """Generate pseudo-labels for the plan's input-only tasks."""
    try:
        cfg = _load_config(config, seed, workers)
        samples = _read_samples([samples_path])
        with open(plans_path, encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
        plans = [
            TransformPlan(
                p["source_dataset_id"],
                tuple(
                    TransformStep(
                        s["transform"],
                        s["derived_task_id"],
                        tuple(sorted(s.get("params", {}).items())),
                    )
                    for s in p["steps"]
                ),
            )
            for p in doc.get("plans", [])
        ]
        labelled, counts = stage_pseudo(cfg, samples, plans)
    except ToolkitError as exc:
        _fail(exc)
    out.mkdir(parents=True, exist_ok=True)
    write_jsonl(out / "samples.jsonl", map(sample_to_dict, labelled))
    click.echo(
        f"labelled {counts['labelled']} samples "
        f"({counts['requests']} requests, {counts['cache_hits']} cache hits)"
    )


@main.command("render")
@config_option
@seed_option
@click.option(
    "--samples",
    "samples_paths",
    required=True,
    multiple=True,
    type=click.Path(path_type=Path),
    help="Sample files; pass multiple times to merge stages.",
)
@out_option
def render_cmd(config: Path, seed, samples_paths, out: Path) -> None:
    """Render samples into six-component instruction records."""
    try:
        cfg = _load_config(config, seed, None)
        samples = _read_samples(samples_paths)
        records, counts = stage_render(cfg, samples)
    except ToolkitError as exc:
        _fail(exc)
    out.mkdir(parents=True, exist_ok=True)
    write_jsonl(out / "records.jsonl", map(record_to_dict, records))
    click.echo(f"rendered {counts['records']} records over {len(counts['tasks'])} tasks")


@main.command("filter")
@config_option
@seed_option
@click.option("--records", "records_path", required=True, type=click.Path(path_type=Path))
@out_option
def filter_cmd(config: Path, seed, records_path: Path, out: Path) -> None:
    """Normalize whitespace, apply the rule filter and the quality judge."""
    try:
        cfg = _load_config(config, seed, None)
        records = _read_records(records_path)
        kept, verdicts, review, counts = stage_filter(cfg, records)
    except ToolkitError as exc:
        _fail(exc)
    out.mkdir(parents=True, exist_ok=True)
    write_jsonl(out / "records.jsonl", map(record_to_dict, kept))
    write_jsonl(
        out / "verdicts.jsonl",
        (v.to_dict() for v in sorted(verdicts, key=lambda v: v.record_id)),
    )
    write_jsonl(out / "review_manifest.jsonl", review)
    click.echo(
        f"kept {counts['kept']}/{counts['in']} "
        f"(rule rejected {counts['rule_rejected']}, flagged {counts['model_flagged']})"
    )


@main.command("split")
@config_option
@seed_option
@click.option("--records", "records_path", required=True, type=click.Path(path_type=Path))
@out_option
def split_cmd(config: Path, seed, records_path: Path, out: Path) -> None:
    """Partition filtered records into train and test."""
    try:
        cfg = _load_config(config, seed, None)
        records = _read_records(records_path)
        result, counts = stage_split(cfg, records)
    except ToolkitError as exc:
        _fail(exc)
    out.mkdir(parents=True, exist_ok=True)
    write_jsonl(out / "train.jsonl", map(record_to_dict, result.train))
    write_jsonl(out / "test.jsonl", map(record_to_dict, result.test))
    (out / "split.yaml").write_text(yaml_dump(result.manifest), encoding="utf-8")
    click.echo(f"train {counts['train']}, test {counts['test']}")


@main.command("eval")
@config_option
@click.option("--gold", "gold_path", required=True, type=click.Path(path_type=Path))
@click.option("--predictions", "pred_path", required=True, type=click.Path(path_type=Path))
@click.option("--figures/--no-figures", default=True)
@out_option
def eval_cmd(config: Path, gold_path: Path, pred_path: Path, figures: bool, out: Path) -> None:
    """Score generations against gold records and write the report."""
    try:
        cfg = _load_config(config, None, None)
        gold = _read_records(gold_path)
        predictions = _read_predictions(pred_path)
        report = evaluate_run(predictions, gold, cfg.registry)
        written = write_eval_outputs(report, out, figures=figures)
    except ToolkitError as exc:
        _fail(exc)
    click.echo(format_report_table(report))
    for path in written:
        click.echo(f"wrote {path}")


@main.command("human-eval")
@click.option("--gold", "gold_path", required=True, type=click.Path(path_type=Path))
@click.option("--run-a", "run_a_path", required=True, type=click.Path(path_type=Path))
@click.option("--run-b", "run_b_path", required=True, type=click.Path(path_type=Path))
@click.option("-n", "n", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@out_option
def human_eval(gold_path: Path, run_a_path: Path, run_b_path: Path, n, seed, out: Path) -> None:
    """Build a blind side-by-side manifest for human judging."""
    try:
        gold = _read_records(gold_path)
        run_a = _read_predictions(run_a_path)
        run_b = _read_predictions(run_b_path)
        rows = build_human_eval_manifest(run_a, run_b, gold, n=n, seed=seed)
    except ToolkitError as exc:
        _fail(exc)
    out.mkdir(parents=True, exist_ok=True)
    write_jsonl(out / "human_eval_manifest.jsonl", rows)
    click.echo(f"wrote {len(rows)} rows to {out / 'human_eval_manifest.jsonl'}")


@main.command("stats")
@click.option("--config", "config", type=click.Path(path_type=Path), default=None)
@click.option("--run", "run_dir", type=click.Path(path_type=Path), default=None,
              help="Run directory containing 06_split/.")
@click.option("--counts", "counts_path", type=click.Path(path_type=Path), default=None,
              help="Declarative counts document instead of a run directory.")
@click.option("--figures/--no-figures", default=True)
@out_option
def stats_cmd(config, run_dir, counts_path, figures: bool, out: Path) -> None:
    """Corpus statistics by language and paradigm, with an ALL row."""
    try:
        if counts_path is not None:
            with open(counts_path, encoding="utf-8") as fh:
                table = stats_from_counts(yaml.safe_load(fh))
        elif run_dir is not None:
            if config is None:
                raise ConfigError("--run requires --config for the task registry")
            cfg = _load_config(config, None, None)
            train = _read_records(Path(run_dir) / "06_split" / "train.jsonl")
            test = _read_records(Path(run_dir) / "06_split" / "test.jsonl")
            table = stats_from_records(train, test, cfg.registry)
        else:
            raise ConfigError("pass either --run or --counts")
        written = write_stats_outputs(table, out, figures=figures)
    except ToolkitError as exc:
        _fail(exc)
    click.echo(format_stats_table(table))
    for path in written:
        click.echo(f"wrote {path}")


@main.command("make-toy")
@out_option
def make_toy(out: Path) -> None:
    """Write the bundled synthetic toy corpus (data, tasks, config)."""
    config_path = write_toy_corpus(out)
    click.echo(f"wrote toy corpus; config at {config_path}")


if __name__ == "__main__":
    main()
