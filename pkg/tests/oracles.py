"""Independent reference implementations used to check the real ones.

These deliberately take a different route than the library code: exhaustive
enumeration for LCS, a full-matrix DP as the second LCS oracle, and a
remove-on-match loop for TP/FP/FN counting.
"""

from __future__ import annotations

from itertools import combinations


def is_subsequence(needle, haystack) -> bool:
    it = iter(haystack)
    return all(any(x == y for y in it) for x in needle)


def lcs_bruteforce(a, b) -> int:
    """Longest common subsequence by enumerating every subsequence of the
    shorter side. Only viable for short inputs."""
    short, long_ = (a, b) if len(a) <= len(b) else (b, a)
    for length in range(len(short), 0, -1):
        for idxs in combinations(range(len(short)), length):
            candidate = [short[i] for i in idxs]
            if is_subsequence(candidate, long_):
                return length
    return 0


def lcs_dp_full(a, b) -> int:
    """Full-matrix dynamic program; independent of the two-row version."""
    m, n = len(a), len(b)
    table = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            if a[i - 1] == b[j - 1]:
                table[i][j] = table[i - 1][j - 1] + 1
            else:
                table[i][j] = max(table[i - 1][j], table[i][j - 1])
    return table[m][n]


def rouge_from_lcs(n_candidate: int, n_reference: int, lcs: int) -> float:
    if n_candidate == 0 or n_reference == 0 or lcs == 0:
        return 0.0
    p = lcs / n_candidate
    r = lcs / n_reference
    return 100.0 * 2.0 * p * r / (p + r)


def count_tp_fp_fn(predicted: list, gold: list) -> tuple[int, int, int]:
    """Multiset TP/FP/FN by removing matches one at a time."""
    remaining = list(gold)
    tp = 0
    for item in predicted:
        if item in remaining:
            remaining.remove(item)
            tp += 1
    fp = len(predicted) - tp
    fn = len(remaining)
    return tp, fp, fn


def prf_from_counts(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    f1 = 0.0 if p + r == 0 else 2 * p * r / (p + r)
    return p, r, f1


def micro_prf_bruteforce(pairs) -> tuple[float, float, float]:
    tp = fp = fn = 0
    for predicted, gold in pairs:
        a, b, c = count_tp_fp_fn(list(predicted), list(gold))
        tp, fp, fn = tp + a, fp + b, fn + c
    return prf_from_counts(tp, fp, fn)


def macro_prf_bruteforce(pairs) -> tuple[float, float, float]:
    def class_of(item):
        return item[0] if isinstance(item, tuple) else item

    classes = sorted({class_of(i) for _, gold in pairs for i in gold})
    if not classes:
        return 0.0, 0.0, 0.0
    ps, rs, fs = [], [], []
    for cls in classes:
        tp = fp = fn = 0
        for predicted, gold in pairs:
            pred_c = [i for i in predicted if class_of(i) == cls]
            gold_c = [i for i in gold if class_of(i) == cls]
            a, b, c = count_tp_fp_fn(pred_c, gold_c)
            tp, fp, fn = tp + a, fp + b, fn + c
        p, r, f1 = prf_from_counts(tp, fp, fn)
        ps.append(p)
        rs.append(r)
        fs.append(f1)
    n = len(classes)
    return sum(ps) / n, sum(rs) / n, sum(fs) / n
