"""Derives atomic tasks from source samples.

Three strategies: simplification (NER -> span detection + entity typing),
reversal (swap input and target), and recombination (split product pairs
into title/attribute matching with sampled negatives). All transforms are
pure given (inputs, seed) and append exactly one lineage entry.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .corpus import (
    ClassLabels,
    MatchPair,
    QaPair,
    RawSample,
    SpanAnnotation,
    Spans,
    TargetText,
)
from .errors import ReversalError
from .ingest import DatasetManifest

SIMPLIFY_NER = "simplify_ner"
REVERSE = "reverse"
RECOMBINE = "recombine_matching"
PSEUDO_LABEL = "pseudo_label"

# Entity-typing inputs carry the designated span appended after the text so
# the original offsets stay valid.
ENTITY_MARKER = "\nEntity: "

# Recombined matching samples get this joiner between title and attribute.
_ATTR_JOINER = "\n"


@dataclass(frozen=True)
class TransformStep:
    transform: str
    derived_task_id: str
    params: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class TransformPlan:
    source_dataset_id: str
    steps: tuple[TransformStep, ...]

    def __post_init__(self) -> None:
        ids = [s.derived_task_id for s in self.steps]
        if len(ids) != len(set(ids)):
            raise ValueError(f"duplicate derived task ids in plan for {self.source_dataset_id}")

    def to_dict(self) -> dict:
        return {
            "source_dataset_id": self.source_dataset_id,
            "steps": [
                {
                    "transform": s.transform,
                    "derived_task_id": s.derived_task_id,
                    "params": {k: v for k, v in s.params},
                }
                for s in self.steps
            ],
        }


@dataclass(frozen=True)
class ReversalSpec:
    """How to reverse one paired-text dataset."""

    derived_dataset_id: str
    answer_joiner: str = "\nAnswer: "


@dataclass
class ForgeDiagnostics:
    messages: list[str] = field(default_factory=list)

    def add(self, msg: str) -> None:
        self.messages.append(msg)


def simplify_ner(sample: RawSample, *, detection_dataset_id: str, typing_dataset_id: str) -> list[RawSample]:
    """Split one NER sample into a span-detection sample plus one
    entity-typing sample per span.

    Detection keeps the input text with labels erased; targets are the
    surfaces in offset order. A zero-span input still yields the detection
    sample (its rendered output becomes the negative token).
    """
    ann = sample.annotations
    if not isinstance(ann, Spans):
        raise ValueError(f"simplify_ner requires Spans annotations, got {ann.kind}")
    ordered = sorted(ann.spans, key=lambda s: (s.start, s.end))
    out = [
        sample.derive(
            id_suffix="det",
            dataset_id=detection_dataset_id,
            annotations=Spans(tuple(SpanAnnotation(s.start, s.end, s.surface, "") for s in ordered)),
            transform=SIMPLIFY_NER,
        )
    ]
    for k, span in enumerate(ordered):
        out.append(
            sample.derive(
                id_suffix=f"typ{k}",
                dataset_id=typing_dataset_id,
                input_text=f"{sample.input_text}{ENTITY_MARKER}{span.surface}",
                annotations=Spans((span,)),
                transform=SIMPLIFY_NER,
            )
        )
    return out


def reverse_task(sample: RawSample, direction: ReversalSpec) -> RawSample:
    """Swap input and target.

    QA pairs become question generation (input gains the answer, target is
    the question); plain target-text tasks swap the two sides, so applying
    the reversal twice restores the original pairing.
    """
    ann = sample.annotations
    if isinstance(ann, QaPair):
        return sample.derive(
            id_suffix="rev",
            dataset_id=direction.derived_dataset_id,
            input_text=f"{sample.input_text}{direction.answer_joiner}{ann.answer}",
            annotations=TargetText(ann.question),
            transform=REVERSE,
        )
    if isinstance(ann, TargetText):
        return sample.derive(
            id_suffix="rev",
            dataset_id=direction.derived_dataset_id,
            input_text=ann.text,
            annotations=TargetText(sample.input_text),
            transform=REVERSE,
        )
    raise ReversalError(f"annotations of kind {ann.kind} are not reversible")


def recombine_matching(
    samples: list[RawSample],
    seed: int,
    *,
    derived_dataset_id: str,
    match_token: str = "Yes",
    no_match_token: str = "No",
) -> tuple[list[RawSample], ForgeDiagnostics]:
    """Build a title/attribute matching task out of product-pair samples.

    For every sample, the first product's title paired with one of its own
    attributes is a positive; the balancing negative pairs the same title
    with an attribute drawn (seeded, uniform) from a product of a different
    sample. A batch of one sample cannot produce negatives.
    """
    diags = ForgeDiagnostics()
    for s in samples:
        if not isinstance(s.annotations, MatchPair):
            raise ValueError(f"recombine_matching requires MatchPair annotations ({s.id})")
    rng = random.Random(seed)
    out: list[RawSample] = []
    can_negate = len(samples) >= 2
    if not can_negate:
        diags.add("batch smaller than 2: emitting positives only")
    for i, sample in enumerate(samples):
        pair = sample.annotations
        assert isinstance(pair, MatchPair)
        own = pair.product_a
        if not own.attributes:
            diags.add(f"{sample.id}: product_a has no attributes, skipped")
            continue
        key, value = own.attributes[rng.randrange(len(own.attributes))]
        out.append(
            sample.derive(
                id_suffix="pos",
                dataset_id=derived_dataset_id,
                input_text=f"{own.title}{_ATTR_JOINER}#{key}#:#{value}#",
                annotations=ClassLabels((match_token,)),
                transform=RECOMBINE,
            )
        )
        if not can_negate:
            continue
        foreign = _pick_foreign_attribute(samples, i, rng)
        if foreign is None:
            # Keep positives and negatives balanced: drop the pair entirely.
            diags.add(f"{sample.id}: no foreign attributes available, pair skipped")
            out.pop()
            continue
        other, fkey, fvalue = foreign
        out.append(
            sample.derive(
                id_suffix="neg",
                dataset_id=derived_dataset_id,
                input_text=f"{own.title}{_ATTR_JOINER}#{fkey}#:#{fvalue}#",
                annotations=ClassLabels((no_match_token,)),
                transform=RECOMBINE,
                extra_roots=(other.id,),
            )
        )
    return out, diags


def _pick_foreign_attribute(
    samples: list[RawSample], own_index: int, rng: random.Random
) -> tuple[RawSample, str, str] | None:
    candidates = []
    for j, other in enumerate(samples):
        if j == own_index:
            continue
        pair = other.annotations
        assert isinstance(pair, MatchPair)
        for product in (pair.product_a, pair.product_b):
            if product.attributes:
                candidates.append((other, product))
    if not candidates:
        return None
    other, product = candidates[rng.randrange(len(candidates))]
    key, value = product.attributes[rng.randrange(len(product.attributes))]
    return other, key, value


# Plan rules: which transforms apply given the annotation kind / data type.
QUERY_PSEUDO_TASKS = (
    ("query-rewriting", "query rewriting"),
    ("query-segmentation", "query segmentation"),
    ("query-question-gen", "query-based question generation"),
)


def plan_atomic_tasks(manifest: DatasetManifest) -> TransformPlan:
    """Enumerate the atomic tasks derivable from one dataset."""
    ds = manifest.dataset_id
    kind = manifest.effective_annotation_kind()
    steps: list[TransformStep] = []
    if kind == "spans":
        steps.append(TransformStep(SIMPLIFY_NER, f"{ds}-span-detection", (("part", "detection"),)))
        steps.append(TransformStep(SIMPLIFY_NER, f"{ds}-entity-typing", (("part", "typing"),)))
    if kind == "qa_pair":
        steps.append(TransformStep(REVERSE, f"{ds}-question-gen"))
    if kind == "target_text" and manifest.data_type != "search_query":
        steps.append(TransformStep(REVERSE, f"{ds}-reversed"))
    if kind == "match_pair":
        steps.append(TransformStep(RECOMBINE, f"{ds}-title-attr-match"))
    if manifest.data_type == "search_query":
        for suffix, description in QUERY_PSEUDO_TASKS:
            steps.append(
                TransformStep(PSEUDO_LABEL, f"{ds}-{suffix}", (("description", description),))
            )
    return TransformPlan(source_dataset_id=ds, steps=tuple(steps))
