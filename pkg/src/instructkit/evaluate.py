"""Scores free-text generations against gold instruction records.

ROUGE-L (LCS-based F-measure, beta = 1) covers every paradigm; CLS and
OTHER tasks additionally get micro/macro precision, recall and F1 after
parsing the generations back into label items. Defaults declared here, not
inherited from anywhere: word tokens for EN, character tokens for ZH, no
case folding inside ROUGE, case-insensitive label matching for EN only.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .corpus import InstructionRecord, Language, Paradigm, ParseRules, TaskSpec
from .errors import EvalError
from .seeding import derive_seed

NO_PREDICTION = None


class TokenizerMode(str, Enum):
    WORD = "WORD"
    CHAR = "CHAR"


def tokenize(text: str, mode: TokenizerMode) -> list[str]:
    if mode is TokenizerMode.WORD:
        return text.split()
    return list(text)


def mode_for_language(language: Language) -> TokenizerMode:
    return TokenizerMode.WORD if language is Language.EN else TokenizerMode.CHAR


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    """Longest common subsequence length in O(|a|*|b|) time, O(min) space."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        curr = [0]
        for j, y in enumerate(b, start=1):
            if x == y:
                curr.append(prev[j - 1] + 1)
            else:
                curr.append(max(prev[j], curr[j - 1]))
        prev = curr
    return prev[len(b)]


def rouge_l(candidate: str, reference: str, mode: TokenizerMode) -> float:
    """LCS F-measure scaled to [0, 100]; 0 when either side is empty."""
    cand = tokenize(candidate, mode)
    ref = tokenize(reference, mode)
    if not cand or not ref:
        return 0.0
    lcs = lcs_length(cand, ref)
    if lcs == 0:
        return 0.0
    precision = lcs / len(cand)
    recall = lcs / len(ref)
    return 100.0 * 2.0 * precision * recall / (precision + recall)


# --- generation parsing ---


def _norm_label(text: str, case_insensitive: bool) -> str:
    collapsed = " ".join(text.split())
    return collapsed.casefold() if case_insensitive else collapsed


def parse_cls_prediction(
    generated: str, candidates: Sequence[str], rules: ParseRules
) -> str | None:
    """Map a free-text generation onto one candidate label.

    Exact match (after whitespace/case normalization) wins; otherwise the
    candidate appearing earliest as a substring, ties broken by longest
    candidate then candidate-list order. Returns None when nothing matches.
    """
    if not candidates:
        raise EvalError("parse_cls_prediction requires a non-empty candidate list")
    text = _norm_label(generated, rules.case_insensitive)
    normed = [_norm_label(c, rules.case_insensitive) for c in candidates]
    for candidate, n in zip(candidates, normed):
        if text == n:
            return candidate
    best: tuple[int, int, int] | None = None  # (position, -len, index)
    for index, (candidate, n) in enumerate(zip(candidates, normed)):
        if not n:
            continue
        position = text.find(n)
        if position < 0:
            continue
        key = (position, -len(n), index)
        if best is None or key < best:
            best = key
    if best is None:
        return NO_PREDICTION
    return candidates[best[2]]


def parse_ner_prediction(generated: str, rules: ParseRules) -> tuple[set[tuple[str, str]], int]:
    """Read "label: surface" pairs back out of a generation.

    Returns (pairs, malformed_line_count); the negative token alone means
    an empty set.
    """
    text = generated.strip()
    if not text or text == rules.negative_token:
        return set(), 0
    pairs: set[tuple[str, str]] = set()
    malformed = 0
    for line in text.split(rules.pair_separator):
        line = line.strip()
        if not line:
            continue
        label, sep, surface = line.partition(rules.kv_separator)
        if not sep or not label.strip() or not surface.strip():
            malformed += 1
            continue
        pairs.add((label.strip(), surface.strip()))
    return pairs, malformed


# --- precision / recall / F1 ---


class Averaging(str, Enum):
    MICRO = "MICRO"
    MACRO = "MACRO"


@dataclass(frozen=True)
class Prf:
    precision: float
    recall: float
    f1: float


def _f1(p: float, r: float) -> float:
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


def _prf_from_counts(tp: int, fp: int, fn: int) -> Prf:
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    return Prf(p, r, _f1(p, r))


def _class_of(item) -> str:
    return item[0] if isinstance(item, tuple) else item


def prf(
    pairs: Sequence[tuple[Iterable, Iterable]],
    averaging: Averaging,
) -> Prf:
    """P/R/F1 over (predicted items, gold items) multiset pairs.

    MICRO pools true/false positives over all records; MACRO scores each
    label class (pooled within the class) and takes the unweighted mean
    over classes present in the gold.
    """
    if averaging is Averaging.MICRO:
        tp = fp = fn = 0
        for predicted, gold in pairs:
            pc, gc = Counter(predicted), Counter(gold)
            overlap = sum((pc & gc).values())
            tp += overlap
            fp += sum(pc.values()) - overlap
            fn += sum(gc.values()) - overlap
        return _prf_from_counts(tp, fp, fn)

    per_class: dict[str, list[int]] = {}
    gold_classes: set[str] = set()
    for predicted, gold in pairs:
        pc, gc = Counter(predicted), Counter(gold)
        gold_classes.update(_class_of(i) for i in gc)
        for cls in {_class_of(i) for i in list(pc) + list(gc)}:
            pcls = Counter({i: c for i, c in pc.items() if _class_of(i) == cls})
            gcls = Counter({i: c for i, c in gc.items() if _class_of(i) == cls})
            overlap = sum((pcls & gcls).values())
            counts = per_class.setdefault(cls, [0, 0, 0])
            counts[0] += overlap
            counts[1] += sum(pcls.values()) - overlap
            counts[2] += sum(gcls.values()) - overlap
    if not gold_classes:
        return Prf(0.0, 0.0, 0.0)
    scores = [_prf_from_counts(*per_class[c]) for c in sorted(gold_classes)]
    n = len(scores)
    return Prf(
        sum(s.precision for s in scores) / n,
        sum(s.recall for s in scores) / n,
        sum(s.f1 for s in scores) / n,
    )


# --- run-level evaluation ---


@dataclass(frozen=True)
class PredictionRecord:
    record_id: str
    generated: str


@dataclass
class TaskResult:
    task_id: str
    paradigm: str
    language: str
    generalization: str | None
    rouge_l: float
    n: int
    n_missing: int
    n_unparsed: int
    micro: Prf | None = None
    macro: Prf | None = None

    def to_dict(self) -> dict:
        d = {
            "task_id": self.task_id,
            "paradigm": self.paradigm,
            "language": self.language,
            "rouge_l": self.rouge_l,
            "n": self.n,
            "n_missing": self.n_missing,
            "n_unparsed": self.n_unparsed,
        }
        if self.generalization is not None:
            d["generalization"] = self.generalization
        for name, value in (("micro", self.micro), ("macro", self.macro)):
            if value is not None:
                d[name] = {"precision": value.precision, "recall": value.recall, "f1": value.f1}
        return d


@dataclass
class Rollup:
    n_tasks: int
    rouge_l: float
    micro: Prf | None = None
    macro: Prf | None = None

    def to_dict(self) -> dict:
        d = {"n_tasks": self.n_tasks, "rouge_l": self.rouge_l}
        for name, value in (("micro", self.micro), ("macro", self.macro)):
            if value is not None:
                d[name] = {"precision": value.precision, "recall": value.recall, "f1": value.f1}
        return d


@dataclass
class EvalReport:
    tasks: dict[str, TaskResult]
    rollups: dict[str, dict[str, Rollup]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "tasks": {tid: t.to_dict() for tid, t in sorted(self.tasks.items())},
            "rollups": {
                group: {key: r.to_dict() for key, r in sorted(members.items())}
                for group, members in sorted(self.rollups.items())
            },
        }


def _gold_cls_items(record: InstructionRecord, spec: TaskSpec) -> list[str]:
    rules = spec.effective_parse_rules()
    if record.output == rules.negative_token:
        return []
    return [part for part in record.output.split(rules.label_delimiter) if part]


def score_task(
    records: list[InstructionRecord],
    predictions: Mapping[str, str],
    spec: TaskSpec,
) -> TaskResult:
    mode = mode_for_language(spec.language)
    rules = spec.effective_parse_rules()
    rouge_total = 0.0
    n_missing = 0
    n_unparsed = 0
    item_pairs: list[tuple[list, list]] = []
    for record in sorted(records, key=lambda r: r.record_id):
        generated = predictions.get(record.record_id)
        if generated is None:
            n_missing += 1
            generated = ""
        rouge_total += rouge_l(generated, record.output, mode)
        if spec.paradigm is Paradigm.CLS:
            candidates = record.candidate_labels or spec.candidate_labels or ()
            label = parse_cls_prediction(generated, candidates, rules)
            if label is NO_PREDICTION:
                n_unparsed += 1
                item_pairs.append(([], _gold_cls_items(record, spec)))
            else:
                item_pairs.append(([label], _gold_cls_items(record, spec)))
        elif spec.paradigm is Paradigm.OTHER:
            predicted, malformed = parse_ner_prediction(generated, rules)
            if malformed:
                n_unparsed += 1
            gold, _ = parse_ner_prediction(record.output, rules)
            item_pairs.append((sorted(predicted), sorted(gold)))
    n = len(records)
    micro = macro = None
    if spec.paradigm in (Paradigm.CLS, Paradigm.OTHER):
        micro = prf(item_pairs, Averaging.MICRO)
        macro = prf(item_pairs, Averaging.MACRO)
    return TaskResult(
        task_id=spec.task_id,
        paradigm=spec.paradigm.value,
        language=spec.language.value,
        generalization=spec.generalization,
        rouge_l=rouge_total / n if n else 0.0,
        n=n,
        n_missing=n_missing,
        n_unparsed=n_unparsed,
        micro=micro,
        macro=macro,
    )


def _mean_prf(values: list[Prf]) -> Prf | None:
    if not values:
        return None
    n = len(values)
    return Prf(
        sum(v.precision for v in values) / n,
        sum(v.recall for v in values) / n,
        sum(v.f1 for v in values) / n,
    )


def _rollup(tasks: list[TaskResult]) -> Rollup:
    return Rollup(
        n_tasks=len(tasks),
        rouge_l=sum(t.rouge_l for t in tasks) / len(tasks),
        micro=_mean_prf([t.micro for t in tasks if t.micro is not None]),
        macro=_mean_prf([t.macro for t in tasks if t.macro is not None]),
    )


def evaluate_run(
    predictions: list[PredictionRecord],
    gold: list[InstructionRecord],
    registry: Mapping[str, TaskSpec],
) -> EvalReport:
    """Per-task metrics plus unweighted rollups.

    Every prediction must resolve to a gold record; gold records without a
    prediction score as empty generations and are counted as missing.
    """
    gold_ids = {r.record_id for r in gold}
    by_id: dict[str, str] = {}
    for p in predictions:
        if p.record_id not in gold_ids:
            raise EvalError(f"prediction for unknown record_id {p.record_id}")
        by_id[p.record_id] = p.generated

    by_task: dict[str, list[InstructionRecord]] = {}
    for record in gold:
        by_task.setdefault(record.task_id, []).append(record)

    tasks: dict[str, TaskResult] = {}
    for task_id in sorted(by_task):
        spec = registry.get(task_id)
        if spec is None:
            raise EvalError(f"no task spec for test task {task_id}")
        tasks[task_id] = score_task(by_task[task_id], by_id, spec)

    results = list(tasks.values())
    rollups: dict[str, dict[str, Rollup]] = {"paradigm": {}, "language": {}, "generalization": {}}
    for key in sorted({t.paradigm for t in results}):
        rollups["paradigm"][key] = _rollup([t for t in results if t.paradigm == key])
    for key in sorted({t.language for t in results}):
        rollups["language"][key] = _rollup([t for t in results if t.language == key])
    for key in sorted({t.generalization for t in results if t.generalization}):
        rollups["generalization"][key] = _rollup(
            [t for t in results if t.generalization == key]
        )
    rollups["overall"] = {"ALL": _rollup(results)} if results else {}
    return EvalReport(tasks=tasks, rollups=rollups)


# --- human evaluation support ---


def build_human_eval_manifest(
    run_a: list[PredictionRecord],
    run_b: list[PredictionRecord],
    gold: list[InstructionRecord],
    n: int = 100,
    seed: int = 0,
) -> list[dict]:
    """Blind side-by-side manifest: n seeded samples per task, seeded
    left/right order, blank win/tie/lose fields."""
    a_by_id = {p.record_id: p.generated for p in run_a}
    b_by_id = {p.record_id: p.generated for p in run_b}
    if set(a_by_id) != set(b_by_id):
        raise EvalError("runs cover different record sets")
    by_task: dict[str, list[InstructionRecord]] = {}
    for record in gold:
        if record.record_id in a_by_id:
            by_task.setdefault(record.task_id, []).append(record)
    rows = []
    for task_id in sorted(by_task):
        members = sorted(by_task[task_id], key=lambda r: r.record_id)
        rng = random.Random(derive_seed(seed, "human-eval", task_id))
        chosen = members if len(members) <= n else rng.sample(members, n)
        for record in sorted(chosen, key=lambda r: r.record_id):
            a_first = rng.random() < 0.5
            left, right = (("a", "b") if a_first else ("b", "a"))
            rows.append(
                {
                    "task_id": task_id,
                    "record_id": record.record_id,
                    "left": a_by_id[record.record_id] if a_first else b_by_id[record.record_id],
                    "right": b_by_id[record.record_id] if a_first else a_by_id[record.record_id],
                    "left_run": left,
                    "right_run": right,
                    "decision": "",
                }
            )
    return rows


def score_human_eval(rows: list[dict]) -> dict[str, float]:
    """Win-or-tie rate of run "a" per task from filled manifest rows.

    A row counts for run "a" when the judged side maps back to it; ties
    count for both runs.
    """
    totals: dict[str, list[int]] = {}
    for row in rows:
        decision = row.get("decision", "")
        if decision not in ("left", "right", "tie"):
            continue
        wins, n = totals.setdefault(row["task_id"], [0, 0])
        if decision == "tie" or row[f"{decision}_run"] == "a":
            totals[row["task_id"]][0] = wins + 1
        totals[row["task_id"]][1] = n + 1
    return {task: wins / n for task, (wins, n) in totals.items() if n}


def human_eval_agreement(rows: list[dict], report: EvalReport) -> float:
    """Pearson correlation between per-task win rates and ROUGE-L."""
    rates = score_human_eval(rows)
    tasks = sorted(set(rates) & set(report.tasks))
    if len(tasks) < 2:
        raise EvalError("need at least two judged tasks for agreement")
    return pearson([rates[t] for t in tasks], [report.tasks[t].rouge_l for t in tasks])


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Sample Pearson correlation coefficient."""
    if len(x) != len(y):
        raise EvalError("pearson requires equal-length inputs")
    if len(x) < 2:
        raise EvalError("pearson requires at least two points")
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    if sxx == 0 or syy == 0:
        raise EvalError("pearson undefined for zero-variance input")
    return sxy / math.sqrt(sxx * syy)
