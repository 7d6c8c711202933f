"""Shared domain types for the instruction corpus.

Everything here is an immutable value object; the canonical on-disk form
for record streams is one JSON object per line, UTF-8, sorted keys.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Mapping


class Paradigm(str, Enum):
    CLS = "CLS"
    EXT = "EXT"
    GEN = "GEN"
    OTHER = "OTHER"


class Language(str, Enum):
    EN = "EN"
    ZH = "ZH"


class LabelSource(str, Enum):
    GOLDEN = "GOLDEN"
    PSEUDO = "PSEUDO"


# Transform name appended to lineage by the pseudo-labeler; validation keys
# the GOLDEN/PSEUDO distinction on its presence.
PSEUDO_LABEL_TRANSFORM = "pseudo_label"

# Derived-sample id grammar: "<root>[+<root>...]#<suffix>". Root ids must not
# contain "#"; ingestion-produced root ids are "<dataset_id>/<n>".
_DERIVED_SEP = "#"
_ROOT_JOIN = "+"


@dataclass(frozen=True)
class SpanAnnotation:
    """A labelled character span; offsets are Unicode scalar indices."""

    start: int
    end: int
    surface: str
    label: str


@dataclass(frozen=True)
class ClassLabels:
    labels: tuple[str, ...]

    kind = "class_labels"


@dataclass(frozen=True)
class Spans:
    spans: tuple[SpanAnnotation, ...]

    kind = "spans"


@dataclass(frozen=True)
class QaPair:
    question: str
    answer: str

    kind = "qa_pair"


@dataclass(frozen=True)
class TargetText:
    text: str

    kind = "target_text"


@dataclass(frozen=True)
class AttributeKv:
    pairs: tuple[tuple[str, str], ...]

    kind = "attribute_kv"


@dataclass(frozen=True)
class ProductEntry:
    title: str
    attributes: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class MatchPair:
    product_a: ProductEntry
    product_b: ProductEntry
    is_match: bool

    kind = "match_pair"


Annotations = ClassLabels | Spans | QaPair | TargetText | AttributeKv | MatchPair

# Annotation kinds a dataset of a given paradigm may carry.
PARADIGM_KINDS: Mapping[Paradigm, frozenset[str]] = {
    Paradigm.CLS: frozenset({"class_labels", "match_pair"}),
    Paradigm.EXT: frozenset({"qa_pair", "spans", "attribute_kv"}),
    Paradigm.GEN: frozenset({"target_text"}),
    Paradigm.OTHER: frozenset({"spans", "attribute_kv"}),
}


@dataclass(frozen=True)
class RawSample:
    """One annotated record, either loaded from a source or derived."""

    id: str
    dataset_id: str
    language: Language
    input_text: str
    annotations: Annotations
    label_source: LabelSource = LabelSource.GOLDEN
    lineage: tuple[str, ...] = ()

    def derive(
        self,
        *,
        id_suffix: str,
        dataset_id: str,
        annotations: Annotations,
        input_text: str | None = None,
        transform: str,
        label_source: LabelSource | None = None,
        extra_roots: Iterable[str] = (),
    ) -> "RawSample":
        """Build a child sample: lineage gains exactly one entry."""
        roots = list(root_source_ids(self.id))
        for other in extra_roots:
            roots.extend(root_source_ids(other))
        base = _ROOT_JOIN.join(dict.fromkeys(roots))
        return RawSample(
            id=f"{base}{_DERIVED_SEP}{id_suffix}",
            dataset_id=dataset_id,
            language=self.language,
            input_text=self.input_text if input_text is None else input_text,
            annotations=annotations,
            label_source=self.label_source if label_source is None else label_source,
            lineage=self.lineage + (transform,),
        )


def root_source_ids(sample_id: str) -> tuple[str, ...]:
    """Source-record ids a (possibly derived) sample id traces back to."""
    return tuple(sample_id.split(_DERIVED_SEP, 1)[0].split(_ROOT_JOIN))


def root_dataset_id(source_id: str) -> str | None:
    """Dataset prefix of an ingestion-produced source id, if present."""
    if "/" in source_id:
        return source_id.split("/", 1)[0]
    return None


@dataclass(frozen=True)
class RenderRules:
    """Serialization settings for gold outputs."""

    pair_separator: str = "\n"
    kv_separator: str = ": "
    label_delimiter: str = ", "
    negative_token: str = "None"
    match_token: str = "Yes"
    no_match_token: str = "No"


@dataclass(frozen=True)
class ParseRules:
    """Settings for reading model generations back into items."""

    pair_separator: str = "\n"
    kv_separator: str = ": "
    label_delimiter: str = ", "
    negative_token: str = "None"
    case_insensitive: bool = True


@dataclass(frozen=True)
class TaskSpec:
    """One task definition: how samples of a dataset become instructions."""

    task_id: str
    dataset_id: str
    paradigm: Paradigm
    language: Language
    task_description: str
    prompts: tuple[str, ...]
    output_constraints: str | None = None
    candidate_labels: tuple[str, ...] | None = None
    render_rules: RenderRules = RenderRules()
    parse_rules: ParseRules | None = None
    generalization: str | None = None

    def __post_init__(self) -> None:
        if not self.prompts:
            raise ValueError(f"task {self.task_id}: prompts must be non-empty")
        needs_candidates = self.paradigm in (Paradigm.CLS, Paradigm.OTHER)
        if needs_candidates and not self.candidate_labels:
            raise ValueError(
                f"task {self.task_id}: candidate_labels required for "
                f"{self.paradigm.value} tasks"
            )
        if not needs_candidates and self.candidate_labels:
            raise ValueError(
                f"task {self.task_id}: candidate_labels only allowed for CLS/OTHER"
            )

    def effective_parse_rules(self) -> ParseRules:
        if self.parse_rules is not None:
            return self.parse_rules
        return ParseRules(
            pair_separator=self.render_rules.pair_separator,
            kv_separator=self.render_rules.kv_separator,
            label_delimiter=self.render_rules.label_delimiter,
            negative_token=self.render_rules.negative_token,
            case_insensitive=self.language is Language.EN,
        )


@dataclass(frozen=True)
class Provenance:
    source_ids: tuple[str, ...]
    lineage: tuple[str, ...]
    label_source: LabelSource


@dataclass(frozen=True)
class InstructionRecord:
    """A fully rendered instruction instance (six-component schema)."""

    record_id: str
    task_id: str
    task_description: str
    prompt: str
    input_text: str
    output: str
    candidate_labels: tuple[str, ...] | None
    output_constraints: str | None
    provenance: Provenance


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_sample(
    sample: RawSample,
    paradigm: Paradigm | None = None,
    label_set: Iterable[str] | None = None,
) -> ValidationResult:
    """Check a sample against the corpus invariants.

    Pure: identical inputs always yield identical results. Paradigm and
    label-set consistency are only checked when the caller supplies the
    owning dataset's declaration.
    """
    violations: list[str] = []
    if not sample.id:
        violations.append("empty id")
    ann = sample.annotations
    if isinstance(ann, Spans):
        n = len(sample.input_text)
        for span in ann.spans:
            if not (0 <= span.start < span.end <= n):
                violations.append(
                    f"span out of range: ({span.start},{span.end}) in text of length {n}"
                )
            elif sample.input_text[span.start : span.end] != span.surface:
                violations.append(
                    f"surface mismatch at ({span.start},{span.end}): "
                    f"{sample.input_text[span.start:span.end]!r} != {span.surface!r}"
                )
    if paradigm is not None and ann.kind not in PARADIGM_KINDS[paradigm]:
        violations.append(
            f"paradigm/annotation mismatch: {ann.kind} not valid for {paradigm.value}"
        )
    if label_set is not None and isinstance(ann, ClassLabels):
        allowed = set(label_set)
        for lab in ann.labels:
            if lab not in allowed:
                violations.append(f"label not in dataset label set: {lab!r}")
    pseudo = PSEUDO_LABEL_TRANSFORM in sample.lineage
    if sample.label_source is LabelSource.PSEUDO and not pseudo:
        violations.append("PSEUDO label_source without pseudo_label lineage")
    if sample.label_source is LabelSource.GOLDEN and pseudo:
        violations.append("GOLDEN label_source after pseudo_label transform")
    return ValidationResult(tuple(violations))


def record_id_for(
    task_id: str,
    source_ids: Iterable[str],
    prompt_index: int,
    lineage: Iterable[str],
) -> str:
    """Stable id so byte-identical reruns produce byte-identical records."""
    h = hashlib.sha256()
    for part in (task_id, *source_ids, str(prompt_index), *lineage):
        h.update(part.encode("utf-8"))
        h.update(b"\x1f")
    return h.hexdigest()[:16]


# --- canonical newline-delimited serialization ---


def dumps_line(obj: Mapping) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True)


def write_jsonl(path, objs: Iterable[Mapping]) -> int:
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for obj in objs:
            fh.write(dumps_line(obj))
            fh.write("\n")
            n += 1
    return n


def read_jsonl(path) -> Iterator[dict]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield json.loads(line)


def annotations_to_dict(ann: Annotations) -> dict:
    if isinstance(ann, ClassLabels):
        return {"kind": ann.kind, "labels": list(ann.labels)}
    if isinstance(ann, Spans):
        return {
            "kind": ann.kind,
            "spans": [
                {"start": s.start, "end": s.end, "surface": s.surface, "label": s.label}
                for s in ann.spans
            ],
        }
    if isinstance(ann, QaPair):
        return {"kind": ann.kind, "question": ann.question, "answer": ann.answer}
    if isinstance(ann, TargetText):
        return {"kind": ann.kind, "text": ann.text}
    if isinstance(ann, AttributeKv):
        return {"kind": ann.kind, "pairs": [list(p) for p in ann.pairs]}
    if isinstance(ann, MatchPair):
        return {
            "kind": ann.kind,
            "product_a": _product_to_dict(ann.product_a),
            "product_b": _product_to_dict(ann.product_b),
            "is_match": ann.is_match,
        }
    raise TypeError(f"unknown annotations type: {type(ann)!r}")


def _product_to_dict(p: ProductEntry) -> dict:
    return {"title": p.title, "attributes": [list(a) for a in p.attributes]}


def _product_from_dict(d: Mapping) -> ProductEntry:
    return ProductEntry(
        title=d["title"],
        attributes=tuple((k, v) for k, v in d["attributes"]),
    )


def annotations_from_dict(d: Mapping) -> Annotations:
    kind = d["kind"]
    if kind == "class_labels":
        return ClassLabels(tuple(d["labels"]))
    if kind == "spans":
        return Spans(
            tuple(
                SpanAnnotation(s["start"], s["end"], s["surface"], s["label"])
                for s in d["spans"]
            )
        )
    if kind == "qa_pair":
        return QaPair(d["question"], d["answer"])
    if kind == "target_text":
        return TargetText(d["text"])
    if kind == "attribute_kv":
        return AttributeKv(tuple((k, v) for k, v in d["pairs"]))
    if kind == "match_pair":
        return MatchPair(
            _product_from_dict(d["product_a"]),
            _product_from_dict(d["product_b"]),
            bool(d["is_match"]),
        )
    raise ValueError(f"unknown annotations kind: {kind!r}")


def sample_to_dict(sample: RawSample) -> dict:
    return {
        "id": sample.id,
        "dataset_id": sample.dataset_id,
        "language": sample.language.value,
        "input_text": sample.input_text,
        "annotations": annotations_to_dict(sample.annotations),
        "label_source": sample.label_source.value,
        "lineage": list(sample.lineage),
    }


def sample_from_dict(d: Mapping) -> RawSample:
    return RawSample(
        id=d["id"],
        dataset_id=d["dataset_id"],
        language=Language(d["language"]),
        input_text=d["input_text"],
        annotations=annotations_from_dict(d["annotations"]),
        label_source=LabelSource(d.get("label_source", "GOLDEN")),
        lineage=tuple(d.get("lineage", ())),
    )


def record_to_dict(rec: InstructionRecord) -> dict:
    d = {
        "record_id": rec.record_id,
        "task_id": rec.task_id,
        "task_description": rec.task_description,
        "prompt": rec.prompt,
        "input_text": rec.input_text,
        "output": rec.output,
        "provenance": {
            "source_ids": list(rec.provenance.source_ids),
            "lineage": list(rec.provenance.lineage),
            "label_source": rec.provenance.label_source.value,
        },
    }
    if rec.candidate_labels is not None:
        d["candidate_labels"] = list(rec.candidate_labels)
    if rec.output_constraints is not None:
        d["output_constraints"] = rec.output_constraints
    return d


def record_from_dict(d: Mapping) -> InstructionRecord:
    prov = d["provenance"]
    candidates = d.get("candidate_labels")
    return InstructionRecord(
        record_id=d["record_id"],
        task_id=d["task_id"],
        task_description=d["task_description"],
        prompt=d["prompt"],
        input_text=d["input_text"],
        output=d["output"],
        candidate_labels=tuple(candidates) if candidates is not None else None,
        output_constraints=d.get("output_constraints"),
        provenance=Provenance(
            source_ids=tuple(prov["source_ids"]),
            lineage=tuple(prov["lineage"]),
            label_source=LabelSource(prov["label_source"]),
        ),
    )
