from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from instructkit.corpus import (
    InstructionRecord,
    LabelSource,
    Language,
    Paradigm,
    ParseRules,
    Provenance,
    TaskSpec,
)
from instructkit.errors import EvalError
from instructkit.evaluate import (
    NO_PREDICTION,
    Averaging,
    PredictionRecord,
    TokenizerMode,
    build_human_eval_manifest,
    evaluate_run,
    lcs_length,
    parse_cls_prediction,
    parse_ner_prediction,
    pearson,
    prf,
    rouge_l,
)
from oracles import (
    lcs_bruteforce,
    lcs_dp_full,
    macro_prf_bruteforce,
    micro_prf_bruteforce,
    rouge_from_lcs,
)

RULES = ParseRules()
RULES_ZH = ParseRules(case_insensitive=False)


# --- LCS ---


def test_lcs_identity():
    tokens = "a b c d".split()
    assert lcs_length(tokens, tokens) == 4


def test_lcs_disjoint_alphabets():
    assert lcs_length(list("abc"), list("xyz")) == 0


def test_lcs_cat_sentences_word_mode():
    a = "the cat sat on mat".split()
    b = "the cat was on the mat".split()
    # Frozen from the exhaustive-subsequence oracle on these 5/6-token inputs.
    assert lcs_bruteforce(a, b) == 4
    assert lcs_length(a, b) == 4


def test_lcs_empty_side():
    assert lcs_length([], list("ab")) == 0
    assert lcs_length(list("ab"), []) == 0


@given(
    a=st.lists(st.sampled_from("xyz"), max_size=8),
    b=st.lists(st.sampled_from("xyz"), max_size=8),
)
def test_lcs_matches_bruteforce(a, b):
    assert lcs_length(a, b) == lcs_bruteforce(a, b)


@given(
    a=st.lists(st.sampled_from("pqrs"), max_size=30),
    b=st.lists(st.sampled_from("pqrs"), max_size=30),
)
def test_lcs_matches_full_matrix_dp(a, b):
    assert lcs_length(a, b) == lcs_dp_full(a, b)


@given(a=st.lists(st.sampled_from("xy"), max_size=10))
def test_lcs_bounds(a):
    assert lcs_length(a, a) == len(a)
    assert lcs_length(a, a[:3]) <= min(len(a), 3)


# --- ROUGE-L ---


def test_rouge_identical_strings_exactly_100():
    assert rouge_l("the same text", "the same text", TokenizerMode.WORD) == 100.0
    assert rouge_l("一样的", "一样的", TokenizerMode.CHAR) == 100.0


def test_rouge_empty_candidate_is_zero():
    assert rouge_l("", "abc", TokenizerMode.WORD) == 0.0
    assert rouge_l("abc", "", TokenizerMode.WORD) == 0.0


def test_rouge_cat_pair_value():
    # From the brute-force LCS oracle: L=4, P=4/5, R=4/6.
    expected = rouge_from_lcs(5, 6, 4)
    assert math.isclose(expected, 72.72727272727273)
    got = rouge_l("the cat sat on mat", "the cat was on the mat", TokenizerMode.WORD)
    assert math.isclose(got, expected)


def test_rouge_100_iff_identical_token_sequences():
    assert rouge_l("a b", "a  b", TokenizerMode.WORD) == 100.0  # same tokens
    assert rouge_l("a b", "a b c", TokenizerMode.WORD) < 100.0


def test_rouge_char_mode_counts_scalars():
    # CHAR tokens: "ab" vs "ax": LCS=1, P=R=1/2 -> 50.
    assert math.isclose(rouge_l("ab", "ax", TokenizerMode.CHAR), 50.0)


# --- CLS parsing ---

ABSA = ["Food", "Price", "Service", "Ambience", "Anecdotes/Miscellaneous"]


def test_parse_exact_candidate():
    assert parse_cls_prediction("Anecdotes/Miscellaneous", ABSA, RULES) == "Anecdotes/Miscellaneous"


def test_parse_substring_rule():
    # Hand-applied: no exact match; "Food" occurs at position 20, no other
    # candidate occurs, so the substring rule returns Food.
    assert parse_cls_prediction("I think the topic is Food.", ABSA, RULES) == "Food"


def test_parse_failure_text_is_no_prediction():
    out = parse_cls_prediction("sorry, I can't retrieve the information", ABSA, RULES)
    assert out is NO_PREDICTION


def test_parse_case_insensitive_for_en():
    assert parse_cls_prediction("FOOD", ABSA, RULES) == "Food"


def test_parse_case_sensitive_when_disabled():
    assert parse_cls_prediction("FOOD", ABSA, RULES_ZH) is NO_PREDICTION


def test_parse_earliest_substring_wins():
    assert parse_cls_prediction("Price then Food", ABSA, RULES) == "Price"


def test_parse_tie_prefers_longer_candidate():
    rules = ParseRules(case_insensitive=True)
    # Both candidates start at position 0; the longer one wins.
    assert parse_cls_prediction("abcd", ["ab", "abcd", "zz"], rules) == "abcd"


# --- NER parsing ---


def test_parse_ner_single_pair():
    pairs, malformed = parse_ner_prediction("图案: 撞色", RULES_ZH)
    assert pairs == {("图案", "撞色")}
    assert malformed == 0


def test_parse_ner_negative_token():
    pairs, malformed = parse_ner_prediction("None", RULES_ZH)
    assert pairs == set()
    assert malformed == 0


def test_parse_ner_malformed_line_counted():
    pairs, malformed = parse_ner_prediction("图案: 撞色\ngarbage\n材质: 熟铁", RULES_ZH)
    assert pairs == {("图案", "撞色"), ("材质", "熟铁")}
    assert malformed == 1


def test_parse_ner_empty_generation():
    assert parse_ner_prediction("", RULES_ZH) == (set(), 0)


# --- PRF ---


def test_prf_perfect_run():
    pairs = [(["A"], ["A"]), ([("B", "x")], [("B", "x")])]
    assert prf(pairs, Averaging.MICRO) == prf(pairs, Averaging.MACRO)
    assert prf(pairs, Averaging.MICRO).f1 == 1.0


def test_prf_micro_half():
    # Set counting: TP=1 ((A,x)), FP=1 ((C,z)), FN=1 ((B,y)).
    pairs = [([("A", "x"), ("C", "z")], [("A", "x"), ("B", "y")])]
    result = prf(pairs, Averaging.MICRO)
    assert (result.precision, result.recall, result.f1) == (0.5, 0.5, 0.5)


def test_prf_all_no_prediction():
    pairs = [([], ["A"]), ([], ["B"])]
    result = prf(pairs, Averaging.MICRO)
    assert (result.precision, result.recall, result.f1) == (0.0, 0.0, 0.0)


def test_prf_micro_equals_macro_single_class():
    pairs = [(["A"], ["A", "A"]), (["A", "A"], ["A"])]
    micro = prf(pairs, Averaging.MICRO)
    macro = prf(pairs, Averaging.MACRO)
    assert micro == macro


def test_prf_macro_ignores_classes_absent_from_gold():
    pairs = [(["C"], ["A"])]
    macro = prf(pairs, Averaging.MACRO)
    # Only class A (in gold) is averaged; its P/R are 0.
    assert macro == prf([([], ["A"])], Averaging.MACRO)


@settings(max_examples=200)
@given(
    data=st.lists(
        st.tuples(
            st.lists(st.sampled_from(["A", "B", ("C", "x"), ("C", "y")]), max_size=5),
            st.lists(st.sampled_from(["A", "B", ("C", "x"), ("C", "y")]), max_size=5),
        ),
        min_size=1,
        max_size=6,
    )
)
def test_prf_matches_bruteforce(data):
    micro = prf(data, Averaging.MICRO)
    assert (micro.precision, micro.recall, micro.f1) == pytest.approx(
        micro_prf_bruteforce(data), abs=1e-12
    )
    macro = prf(data, Averaging.MACRO)
    assert (macro.precision, macro.recall, macro.f1) == pytest.approx(
        macro_prf_bruteforce(data), abs=1e-12
    )


# --- run-level evaluation ---


def _spec(task_id="cls-task", paradigm=Paradigm.CLS, language=Language.EN, **kwargs):
    defaults = dict(
        task_id=task_id,
        dataset_id="ds",
        paradigm=paradigm,
        language=language,
        task_description="d",
        prompts=("p",),
        candidate_labels=("Food", "Price") if paradigm in (Paradigm.CLS, Paradigm.OTHER) else None,
    )
    defaults.update(kwargs)
    return TaskSpec(**defaults)


def _record(record_id, task_id, output, candidates=("Food", "Price")):
    return InstructionRecord(
        record_id=record_id,
        task_id=task_id,
        task_description="d",
        prompt="p",
        input_text="i",
        output=output,
        candidate_labels=candidates,
        output_constraints=None,
        provenance=Provenance((record_id,), (), LabelSource.GOLDEN),
    )


def test_identity_run_scores_perfectly():
    registry = {
        "cls-task": _spec(),
        "gen-task": _spec("gen-task", Paradigm.GEN),
    }
    gold = [
        _record("r1", "cls-task", "Food"),
        _record("r2", "cls-task", "Price"),
        _record("r3", "gen-task", "a long description", candidates=None),
    ]
    predictions = [PredictionRecord(r.record_id, r.output) for r in gold]
    report = evaluate_run(predictions, gold, registry)
    for task in report.tasks.values():
        assert task.rouge_l == 100.0
        if task.micro is not None:
            assert task.micro.f1 == 1.0
            assert task.macro.f1 == 1.0
    assert report.rollups["overall"]["ALL"].rouge_l == 100.0


def test_empty_prediction_file():
    registry = {"cls-task": _spec()}
    gold = [_record("r1", "cls-task", "Food"), _record("r2", "cls-task", "Price")]
    report = evaluate_run([], gold, registry)
    task = report.tasks["cls-task"]
    assert task.rouge_l == 0.0
    assert task.micro.f1 == 0.0
    assert task.n_missing == 2


def test_unknown_record_id_rejected():
    registry = {"cls-task": _spec()}
    gold = [_record("r1", "cls-task", "Food")]
    with pytest.raises(EvalError, match="unknown record_id"):
        evaluate_run([PredictionRecord("ghost", "x")], gold, registry)


def test_missing_spec_rejected():
    gold = [_record("r1", "mystery", "Food")]
    with pytest.raises(EvalError, match="no task spec"):
        evaluate_run([], gold, {})


def test_mixed_toy_run_matches_per_record_oracle():
    # 20 records across one CLS and one NER task; recompute every number
    # record by record with the independent oracles.
    rng = random.Random(5)
    registry = {
        "cls-task": _spec(),
        "ner-task": _spec("ner-task", Paradigm.OTHER, candidate_labels=("图案", "材质")),
    }
    gold = []
    predictions = []
    for i in range(10):
        label = rng.choice(["Food", "Price"])
        gold.append(_record(f"c{i}", "cls-task", label))
        predictions.append(
            PredictionRecord(f"c{i}", rng.choice(["Food", "Price", "no idea", f"maybe {label}"]))
        )
    ner_outputs = ["图案: 撞色", "材质: 熟铁", "图案: 复古\n材质: 亚麻", "None"]
    for i in range(10):
        out = rng.choice(ner_outputs)
        gold.append(_record(f"n{i}", "ner-task", out, candidates=("图案", "材质")))
        predictions.append(PredictionRecord(f"n{i}", rng.choice(ner_outputs + ["garbage line"])))

    report = evaluate_run(predictions, gold, registry)
    by_id = {p.record_id: p.generated for p in predictions}

    # Oracle for the CLS task.
    cls_rules = registry["cls-task"].effective_parse_rules()
    cls_pairs = []
    rouge_values = []
    for record in gold[:10]:
        generated = by_id[record.record_id]
        label = parse_cls_prediction(generated, record.candidate_labels, cls_rules)
        cls_pairs.append(([label] if label else [], [record.output]))
        rouge_values.append(
            rouge_from_lcs(
                len(generated.split()),
                len(record.output.split()),
                lcs_dp_full(generated.split(), record.output.split()),
            )
        )
    task = report.tasks["cls-task"]
    assert task.rouge_l == pytest.approx(sum(rouge_values) / 10)
    assert (task.micro.precision, task.micro.recall, task.micro.f1) == pytest.approx(
        micro_prf_bruteforce(cls_pairs)
    )
    assert (task.macro.precision, task.macro.recall, task.macro.f1) == pytest.approx(
        macro_prf_bruteforce(cls_pairs)
    )

    # Oracle for the NER task (CHAR tokens: language defaults apply to EN
    # here, but the spec language is EN so WORD mode is used).
    ner_rules = registry["ner-task"].effective_parse_rules()
    ner_pairs = []
    for record in gold[10:]:
        generated = by_id[record.record_id]
        predicted, _ = parse_ner_prediction(generated, ner_rules)
        gold_items, _ = parse_ner_prediction(record.output, ner_rules)
        ner_pairs.append((sorted(predicted), sorted(gold_items)))
    task = report.tasks["ner-task"]
    assert (task.micro.precision, task.micro.recall, task.micro.f1) == pytest.approx(
        micro_prf_bruteforce(ner_pairs)
    )

    # Rollups are unweighted means of the member tasks.
    overall = report.rollups["overall"]["ALL"]
    assert overall.rouge_l == pytest.approx(
        (report.tasks["cls-task"].rouge_l + report.tasks["ner-task"].rouge_l) / 2
    )


# --- human eval ---


def _full_runs():
    registry = {"cls-task": _spec()}
    gold = [_record(f"r{i}", "cls-task", "Food") for i in range(30)]
    run_a = [PredictionRecord(r.record_id, f"a {r.record_id}") for r in gold]
    run_b = [PredictionRecord(r.record_id, f"b {r.record_id}") for r in gold]
    return registry, gold, run_a, run_b


def test_human_eval_rows_capped_by_task_size():
    _, gold, run_a, run_b = _full_runs()
    rows = build_human_eval_manifest(run_a, run_b, gold, n=100, seed=3)
    assert len(rows) == 30
    rows = build_human_eval_manifest(run_a, run_b, gold, n=10, seed=3)
    assert len(rows) == 10


def test_human_eval_deterministic_including_sides():
    _, gold, run_a, run_b = _full_runs()
    first = build_human_eval_manifest(run_a, run_b, gold, n=100, seed=3)
    second = build_human_eval_manifest(run_a, run_b, gold, n=100, seed=3)
    assert first == second
    sides = {row["left_run"] for row in first}
    assert sides == {"a", "b"}  # seeded shuffle actually mixes sides


def test_human_eval_coverage_mismatch_rejected():
    _, gold, run_a, run_b = _full_runs()
    with pytest.raises(EvalError, match="different record sets"):
        build_human_eval_manifest(run_a[:-1], run_b, gold)


def test_human_eval_rows_blank_decision():
    _, gold, run_a, run_b = _full_runs()
    for row in build_human_eval_manifest(run_a, run_b, gold, n=5, seed=1):
        assert row["decision"] == ""


# --- pearson ---


def test_pearson_perfect_correlation():
    assert pearson([1, 2, 3], [1, 2, 3]) == pytest.approx(1.0)


def test_pearson_perfect_anticorrelation():
    assert pearson([1, 2, 3], [-1, -2, -3]) == pytest.approx(-1.0)


def test_pearson_documented_triple():
    # Direct formula: sum xy-centered = 2, sxx = 2, syy = 8/3,
    # r = 2 / sqrt(16/3) = sqrt(3)/2.
    assert pearson([1, 2, 3], [2, 2, 4]) == pytest.approx(math.sqrt(3) / 2, abs=1e-12)


def test_pearson_errors():
    with pytest.raises(EvalError):
        pearson([1, 2], [1, 2, 3])
    with pytest.raises(EvalError):
        pearson([1], [1])
    with pytest.raises(EvalError):
        pearson([1, 1, 1], [1, 2, 3])


def test_human_eval_agreement_against_direct_formula():
    from instructkit.evaluate import human_eval_agreement, score_human_eval

    registry = {
        f"t{i}": _spec(f"t{i}", Paradigm.GEN, candidate_labels=None) for i in range(3)
    }
    gold = []
    predictions = []
    for i in range(3):
        for j in range(4):
            record = _record(f"t{i}r{j}", f"t{i}", "gold text here", candidates=None)
            gold.append(record)
            # Degrade quality per task so ROUGE differs across tasks.
            generated = "gold text here" if j < 4 - i else "unrelated words entirely"
            predictions.append(PredictionRecord(record.record_id, generated))
    report = evaluate_run(predictions, gold, registry)

    rows = []
    wins = {"t0": 4, "t1": 2, "t2": 1}  # run "a" wins per task out of 4
    for i in range(3):
        task = f"t{i}"
        for j in range(4):
            decision = "left" if j < wins[task] else "right"
            rows.append(
                {
                    "task_id": task,
                    "record_id": f"{task}r{j}",
                    "left_run": "a",
                    "right_run": "b",
                    "decision": decision,
                }
            )
    rates = score_human_eval(rows)
    assert rates == {"t0": 1.0, "t1": 0.5, "t2": 0.25}
    expected = pearson(
        [rates[t] for t in sorted(rates)],
        [report.tasks[t].rouge_l for t in sorted(rates)],
    )
    assert human_eval_agreement(rows, report) == pytest.approx(expected)


def test_score_human_eval_counts_ties_for_both():
    from instructkit.evaluate import score_human_eval

    rows = [
        {"task_id": "t", "left_run": "b", "right_run": "a", "decision": "tie"},
        {"task_id": "t", "left_run": "b", "right_run": "a", "decision": "left"},
        {"task_id": "t", "left_run": "b", "right_run": "a", "decision": "right"},
        {"task_id": "t", "left_run": "a", "right_run": "b", "decision": ""},
    ]
    assert score_human_eval(rows) == {"t": pytest.approx(2 / 3)}
