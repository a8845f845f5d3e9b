import json
import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from auscult.metrics import (
    NEG,
    POS,
    ConfusionMatrix,
    MetricsReport,
    aggregate_subject,
    as_label,
    compute_metrics,
    confusion,
)

counts = st.integers(0, 500)


def test_confusion_examples():
    assert confusion([POS, NEG], [POS, NEG]) == ConfusionMatrix(tp=1, fp=0, tn=1, fn=0)
    assert confusion([POS] * 3, [NEG] * 3).fp == 3
    with pytest.raises(ValueError):
        confusion([POS], [POS, NEG])
    with pytest.raises(ValueError):
        confusion([], [])


def test_confusion_matches_brute_force():
    rng = np.random.default_rng(0)
    p = rng.integers(0, 2, 1000)
    y = rng.integers(0, 2, 1000)
    cm = confusion(p, y)
    tally = {"tp": 0, "fp": 0, "tn": 0, "fn": 0}
    for a, b in zip(p, y):
        tally[("t" if a == b else "f") + ("p" if a else "n")] += 1
    assert cm == ConfusionMatrix(**tally)


def test_label_spellings():
    assert as_label("abnormal") == as_label(1) == as_label(True) == as_label("POS") == POS
    assert as_label("normal") == as_label(0) == as_label("neg") == NEG
    with pytest.raises(ValueError):
        as_label("unsure")


def test_matrix_validation():
    with pytest.raises(ValueError):
        ConfusionMatrix(-1, 0, 0, 0)
    with pytest.raises(ValueError):
        ConfusionMatrix(1.5, 0, 0, 0)
    with pytest.raises(ValueError):
        compute_metrics(ConfusionMatrix(0, 0, 0, 0))


def test_perfect_classifier():
    r = compute_metrics(ConfusionMatrix(tp=5, fp=0, tn=5, fn=0))
    assert all(v == 1.0 for v in r.to_dict().values())
    assert r.row().endswith("1.000")


def test_all_positive_predictor_on_all_positive_labels():
    r = compute_metrics(ConfusionMatrix(tp=10, fp=0, tn=0, fn=0))
    assert math.isnan(r.tnr) and math.isnan(r.npv) and math.isnan(r.f1_neg) and math.isnan(r.mcc)
    assert r.tpr == 1.0 and r.f1_pos == 1.0
    assert r.to_dict()["tnr"] is None
    assert "NaN" in r.row()
    json.loads(r.to_json())


def test_row_and_header_format():
    r = compute_metrics(ConfusionMatrix(tp=52, fp=3, tn=21, fn=5))
    cells = r.row().split()
    assert MetricsReport.header().split() == ["Acc", "Acc-mu", "TPR", "TNR", "PPV", "NPV", "F1+", "F1-", "MCC"]
    assert cells[2] == "91.23%" and cells[3] == "87.50%" and cells[-1] == "0.770"


@given(counts, counts, counts, counts)
def test_mcc_equals_rate_identity(tp, fp, tn, fn):
    assume(min(tp + fn, tn + fp, tp + fp, tn + fn) > 0)
    r = compute_metrics(ConfusionMatrix(tp, fp, tn, fn))
    fnr, fpr, fdr, fo = 1 - r.tpr, 1 - r.tnr, 1 - r.ppv, 1 - r.npv
    assert r.mcc == pytest.approx(math.sqrt(r.tpr * r.tnr * r.ppv * r.npv) - math.sqrt(fnr * fpr * fdr * fo),
                                  abs=1e-9)
    assert -1 <= r.mcc <= 1


@given(counts, counts, counts, counts, st.integers(1, 20))
def test_balanced_accuracy_prevalence_invariant(tp, fp, tn, fn, k):
    assume(tp + fn > 0 and tn + fp > 0)
    a = compute_metrics(ConfusionMatrix(tp, fp, tn, fn))
    b = compute_metrics(ConfusionMatrix(k * tp, fp, tn, k * fn))
    assert (a.tpr, a.tnr, a.balanced_acc) == (b.tpr, b.tnr, b.balanced_acc)
    assert min(a.tpr, a.tnr) <= a.acc + 1e-12 and a.acc <= max(a.tpr, a.tnr) + 1e-12


@given(counts, counts, counts, counts)
def test_label_swap_antisymmetry(tp, fp, tn, fn):
    assume(tp + fp + tn + fn > 0)
    cm = ConfusionMatrix(tp, fp, tn, fn)
    a, b = compute_metrics(cm), compute_metrics(cm.swapped())

    def same(x, y):
        return (math.isnan(x) and math.isnan(y)) or x == pytest.approx(y, abs=1e-12)

    assert same(a.tpr, b.tnr) and same(a.ppv, b.npv) and same(a.f1_pos, b.f1_neg)
    assert same(a.mcc, b.mcc)


def test_aggregate_subject_examples():
    assert aggregate_subject([0.9, 0.8, 0.1]) == POS
    assert aggregate_subject([0.2, 0.2]) == NEG
    assert aggregate_subject([0.5]) == POS
    with pytest.raises(ValueError):
        aggregate_subject([])


def test_aggregate_subject_matches_brute_force_mean():
    scores = np.random.default_rng(1).random(1000)
    mean = sum(float(s) for s in scores) / len(scores)
    assert aggregate_subject(scores) == (POS if mean >= 0.5 else NEG)
    assert aggregate_subject(scores, threshold=mean + 1e-9) == NEG
