"""Turns (sample, task spec) into six-component instruction records."""

from __future__ import annotations

import random
import re

from .corpus import (
    Annotations,
    AttributeKv,
    ClassLabels,
    InstructionRecord,
    MatchPair,
    Paradigm,
    Provenance,
    QaPair,
    RawSample,
    RenderRules,
    Spans,
    TargetText,
    TaskSpec,
    record_id_for,
    root_source_ids,
)
from .errors import RenderError
from .forge import ENTITY_MARKER

# Templates may reference exactly these placeholders, written as {name}.
PLACEHOLDERS = ("input", "candidates", "constraints", "entity")

_PLACEHOLDER_RE = re.compile(r"\{([a-z_]+)\}")

# QA samples keep the context alone in input_text (so reversal cannot leak
# the question); the question joins the visible input only at render time.
QUESTION_MARKER = "\nQuestion: "


def visible_input(sample: RawSample) -> str:
    if isinstance(sample.annotations, QaPair):
        return f"{sample.input_text}{QUESTION_MARKER}{sample.annotations.question}"
    return sample.input_text


def serialize_output(annotations: Annotations, paradigm: Paradigm, rules: RenderRules) -> str:
    """Gold output text for an annotation.

    Class labels join with the configured delimiter; spans and attribute
    pairs print one "label: surface" per separator, in offset order for
    spans; anything empty collapses to the negative token.
    """
    if isinstance(annotations, ClassLabels):
        if not annotations.labels:
            return rules.negative_token
        return rules.label_delimiter.join(annotations.labels)
    if isinstance(annotations, Spans):
        ordered = sorted(annotations.spans, key=lambda s: (s.start, s.end))
        lines = [
            f"{s.label}{rules.kv_separator}{s.surface}" if s.label else s.surface
            for s in ordered
        ]
        return rules.pair_separator.join(lines) if lines else rules.negative_token
    if isinstance(annotations, AttributeKv):
        lines = [f"{k}{rules.kv_separator}{v}" for k, v in annotations.pairs]
        return rules.pair_separator.join(lines) if lines else rules.negative_token
    if isinstance(annotations, QaPair):
        return annotations.answer
    if isinstance(annotations, TargetText):
        return annotations.text
    if isinstance(annotations, MatchPair):
        return rules.match_token if annotations.is_match else rules.no_match_token
    raise RenderError(f"cannot serialize annotations of kind {annotations.kind}")


def choose_prompt(spec: TaskSpec, record_seed: int) -> int:
    """Seeded uniform choice over the task's prompt pool."""
    if len(spec.prompts) == 1:
        return 0
    return random.Random(record_seed).randrange(len(spec.prompts))


def _binding(name: str, sample: RawSample, spec: TaskSpec) -> str:
    if name == "input":
        return visible_input(sample)
    if name == "candidates":
        if not spec.candidate_labels:
            raise RenderError(f"task {spec.task_id}: template uses {{candidates}} but spec has none")
        return spec.render_rules.label_delimiter.join(spec.candidate_labels)
    if name == "constraints":
        if spec.output_constraints is None:
            raise RenderError(f"task {spec.task_id}: template uses {{constraints}} but spec has none")
        return spec.output_constraints
    if name == "entity":
        marker = sample.input_text.rfind(ENTITY_MARKER)
        if marker < 0:
            raise RenderError(f"task {spec.task_id}: template uses {{entity}} but input has no entity marker")
        return sample.input_text[marker + len(ENTITY_MARKER):]
    raise RenderError(f"unresolved placeholder {{{name}}}")


def fill_template(template: str, sample: RawSample, spec: TaskSpec) -> str:
    # Single-pass substitution: braces inside bound values are never rescanned.
    pieces: list[str] = []
    pos = 0
    for m in _PLACEHOLDER_RE.finditer(template):
        name = m.group(1)
        if name not in PLACEHOLDERS:
            raise RenderError(f"unresolved placeholder {{{name}}} in template")
        pieces.append(template[pos : m.start()])
        pieces.append(_binding(name, sample, spec))
        pos = m.end()
    pieces.append(template[pos:])
    return "".join(pieces)


def render(sample: RawSample, spec: TaskSpec, prompt_index: int) -> InstructionRecord:
    """Render one sample under one task spec.

    All four mandatory components come out non-empty; the optional ones are
    present exactly when the spec declares them.
    """
    if sample.annotations.kind not in _KINDS_FOR[spec.paradigm]:
        raise RenderError(
            f"task {spec.task_id}: {spec.paradigm.value} spec cannot render "
            f"{sample.annotations.kind} annotations"
        )
    if not 0 <= prompt_index < len(spec.prompts):
        raise RenderError(f"task {spec.task_id}: prompt index {prompt_index} out of range")
    prompt = fill_template(spec.prompts[prompt_index], sample, spec)
    output = serialize_output(sample.annotations, spec.paradigm, spec.render_rules)
    source_ids = root_source_ids(sample.id)
    # Hash the full sample id, not just the roots: sibling derivations (one
    # typing sample per span) share roots and lineage but must not collide.
    return InstructionRecord(
        record_id=record_id_for(spec.task_id, (sample.id,), prompt_index, sample.lineage),
        task_id=spec.task_id,
        task_description=spec.task_description,
        prompt=prompt,
        input_text=visible_input(sample),
        output=output,
        candidate_labels=spec.candidate_labels,
        output_constraints=spec.output_constraints,
        provenance=Provenance(
            source_ids=source_ids,
            lineage=sample.lineage,
            label_source=sample.label_source,
        ),
    )


# Renderable annotation kinds per task paradigm (superset of the dataset
# mapping: OTHER rendering also accepts bare-label spans from detection).
_KINDS_FOR = {
    Paradigm.CLS: {"class_labels", "match_pair"},
    Paradigm.EXT: {"qa_pair", "spans", "attribute_kv"},
    Paradigm.GEN: {"target_text"},
    Paradigm.OTHER: {"spans", "attribute_kv"},
}
