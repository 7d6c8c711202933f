"""Dataset registry and source-format adapters.

Source records become RawSample streams. Ids are assigned as
"<dataset_id>/<line>" for adapter formats that carry none of their own;
the canonical adapter trusts the ids already present in the file.
Malformed lines are skipped and reported, never fatal.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .corpus import (
    ClassLabels,
    Language,
    Paradigm,
    RawSample,
    SpanAnnotation,
    Spans,
    TargetText,
    sample_from_dict,
    validate_sample,
)
from .errors import ConfigError

DATA_TYPES = (
    "product_info",
    "user_review",
    "user_dialogue",
    "search_query",
    "address",
    "other",
)

ANNOTATION_KINDS = (
    "class_labels",
    "spans",
    "qa_pair",
    "target_text",
    "attribute_kv",
    "match_pair",
)

# Default annotation kind when a manifest does not declare one.
_ADAPTER_KINDS = {"csv_cls": "class_labels", "ner_spans": "spans", "text_lines": "target_text"}
_PARADIGM_KIND_DEFAULTS = {
    Paradigm.CLS: "class_labels",
    Paradigm.EXT: "qa_pair",
    Paradigm.GEN: "target_text",
    Paradigm.OTHER: "spans",
}


@dataclass(frozen=True)
class DatasetManifest:
    dataset_id: str
    paradigm: Paradigm
    language: Language
    path: str
    adapter: str
    data_type: str = "other"
    labels: tuple[str, ...] | None = None
    annotation_kind: str | None = None

    def __post_init__(self) -> None:
        if self.data_type not in DATA_TYPES:
            raise ConfigError(
                f"dataset {self.dataset_id}: unknown data_type {self.data_type!r}"
            )
        if self.paradigm is Paradigm.CLS and not self.labels:
            raise ConfigError(
                f"dataset {self.dataset_id}: label set required for CLS datasets"
            )
        if self.annotation_kind is not None and self.annotation_kind not in ANNOTATION_KINDS:
            raise ConfigError(
                f"dataset {self.dataset_id}: unknown annotation_kind "
                f"{self.annotation_kind!r}"
            )

    def effective_annotation_kind(self) -> str:
        if self.annotation_kind:
            return self.annotation_kind
        if self.adapter in _ADAPTER_KINDS:
            return _ADAPTER_KINDS[self.adapter]
        return _PARADIGM_KIND_DEFAULTS[self.paradigm]


@dataclass
class LoadDiagnostic:
    dataset_id: str
    line: int
    message: str


@dataclass
class LoadResult:
    samples: list[RawSample]
    diagnostics: list[LoadDiagnostic] = field(default_factory=list)

    @property
    def error_count(self) -> int:
        return len(self.diagnostics)


# An adapter turns one source line into a sample; raising ValueError (or
# friends) marks the line malformed.
LineAdapter = Callable[["DatasetManifest", int, str], RawSample]


def _source_id(manifest: DatasetManifest, index: int) -> str:
    return f"{manifest.dataset_id}/{index:06d}"


def _parse_jsonl(manifest: DatasetManifest, lineno: int, line: str) -> RawSample:
    """Canonical newline-delimited RawSample records."""
    return sample_from_dict(json.loads(line))


def _parse_csv_cls(manifest: DatasetManifest, lineno: int, line: str) -> RawSample:
    """Column-separated classification: text <TAB> label[|label...]."""
    text, sep, labels = line.partition("\t")
    if not sep or not text or not labels:
        raise ValueError("expected 'text<TAB>label[|label...]'")
    return RawSample(
        id=_source_id(manifest, lineno),
        dataset_id=manifest.dataset_id,
        language=manifest.language,
        input_text=text,
        annotations=ClassLabels(tuple(labels.split("|"))),
    )


def _parse_ner_spans(manifest: DatasetManifest, lineno: int, line: str) -> RawSample:
    """Span-annotated records: {"text": ..., "spans": [[start, end, label], ...]}."""
    obj = json.loads(line)
    text = obj["text"]
    spans = tuple(
        SpanAnnotation(start, end, text[start:end], label)
        for start, end, label in obj["spans"]
    )
    return RawSample(
        id=_source_id(manifest, lineno),
        dataset_id=manifest.dataset_id,
        language=manifest.language,
        input_text=text,
        annotations=Spans(spans),
    )


def _parse_text_lines(manifest: DatasetManifest, lineno: int, line: str) -> RawSample:
    """Input-only lines (queries, metadata); target filled later by pseudo-labeling."""
    return RawSample(
        id=_source_id(manifest, lineno),
        dataset_id=manifest.dataset_id,
        language=manifest.language,
        input_text=line,
        annotations=TargetText(""),
    )


ADAPTERS: dict[str, LineAdapter] = {
    "jsonl": _parse_jsonl,
    "csv_cls": _parse_csv_cls,
    "ner_spans": _parse_ner_spans,
    "text_lines": _parse_text_lines,
}


@dataclass(frozen=True)
class DatasetHandle:
    manifest: DatasetManifest


class DatasetRegistry:
    """Holds the declared datasets of a run; ids are unique."""

    def __init__(self) -> None:
        self._datasets: dict[str, DatasetHandle] = {}

    def register(self, manifest: DatasetManifest) -> DatasetHandle:
        if manifest.adapter not in ADAPTERS:
            raise ConfigError(
                f"dataset {manifest.dataset_id}: unknown adapter {manifest.adapter!r}"
            )
        if manifest.dataset_id in self._datasets:
            raise ConfigError(f"duplicate dataset_id {manifest.dataset_id!r}")
        handle = DatasetHandle(manifest)
        self._datasets[manifest.dataset_id] = handle
        return handle

    def get(self, dataset_id: str) -> DatasetHandle:
        try:
            return self._datasets[dataset_id]
        except KeyError:
            raise ConfigError(f"unknown dataset_id {dataset_id!r}") from None

    def dataset_ids(self) -> list[str]:
        return sorted(self._datasets)

    def handles(self) -> list[DatasetHandle]:
        return [self._datasets[k] for k in self.dataset_ids()]


def register_dataset(registry: DatasetRegistry, manifest: DatasetManifest) -> DatasetHandle:
    return registry.register(manifest)


def load_samples(handle: DatasetHandle, base_dir: Path | str = ".") -> LoadResult:
    """Load one dataset; emission order follows source record order.

    Every emitted sample passes validation; invalid or unparseable lines
    are reported with their line number and skipped.
    """
    manifest = handle.manifest
    path = Path(base_dir) / manifest.path
    if not path.exists():
        raise ConfigError(f"dataset {manifest.dataset_id}: missing source {path}")
    adapter = ADAPTERS[manifest.adapter]
    label_set = manifest.labels if manifest.paradigm is Paradigm.CLS else None
    result = LoadResult(samples=[])

    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            try:
                sample = adapter(manifest, lineno, line)
            except (ValueError, KeyError, TypeError, IndexError) as exc:
                result.diagnostics.append(
                    LoadDiagnostic(manifest.dataset_id, lineno, f"malformed record: {exc}")
                )
                continue
            if sample.dataset_id != manifest.dataset_id:
                result.diagnostics.append(
                    LoadDiagnostic(
                        manifest.dataset_id,
                        lineno,
                        f"record dataset_id {sample.dataset_id!r} does not match manifest",
                    )
                )
                continue
            check = validate_sample(sample, paradigm=manifest.paradigm, label_set=label_set)
            if check.ok:
                result.samples.append(sample)
            else:
                result.diagnostics.append(
                    LoadDiagnostic(manifest.dataset_id, lineno, "; ".join(check.violations))
                )
    return result


# --- attribute key-value surface form ---

_KV_SEGMENT = re.compile(r"^#([^#]+)#:#([^#]+)#$")


@dataclass
class KvParse:
    pairs: list[tuple[str, str]]
    diagnostics: list[str] = field(default_factory=list)


def parse_attribute_kv(text: str) -> KvParse:
    """Parse "#key#:#value#;" product strings into ordered pairs.

    Segments that do not match the grammar are reported, not dropped
    silently; a trailing separator is not an error.
    """
    result = KvParse(pairs=[])
    for segment in text.split(";"):
        if not segment:
            continue
        m = _KV_SEGMENT.match(segment)
        if m:
            result.pairs.append((m.group(1), m.group(2)))
        else:
            result.diagnostics.append(f"unparseable segment: {segment!r}")
    return result


def serialize_kv(pairs: list[tuple[str, str]] | tuple[tuple[str, str], ...]) -> str:
    return "".join(f"#{k}#:#{v}#;" for k, v in pairs)
