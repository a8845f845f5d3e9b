"""Binary classification measures: rates, balanced accuracy, F1 for both classes, MCC."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

POS, NEG = "pos", "neg"
UNDEFINED = float("nan")

_POSITIVE = {"pos", "positive", "1", "abnormal", "true"}
_NEGATIVE = {"neg", "negative", "0", "normal", "false"}


def as_label(value) -> str:
    """Map common spellings (``pos``/``neg``, 1/0, abnormal/normal, bools) to ``pos``/``neg``."""
    if isinstance(value, (bool, np.bool_)):
        return POS if value else NEG
    key = str(int(value)) if isinstance(value, (int, np.integer)) else str(value).strip().lower()
    if key in _POSITIVE:
        return POS
    if key in _NEGATIVE:
        return NEG
    raise ValueError(f"cannot interpret {value!r} as a binary label")


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        for name in ("tp", "fp", "tn", "fn"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v}")
            object.__setattr__(self, name, int(v))

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def swapped(self) -> "ConfusionMatrix":
        """The same outcomes with the positive and negative classes exchanged."""
        return ConfusionMatrix(tp=self.tn, fp=self.fn, tn=self.tp, fn=self.fp)


def confusion(preds, labels) -> ConfusionMatrix:
    preds = [as_label(p) for p in preds]
    labels = [as_label(y) for y in labels]
    if len(preds) != len(labels):
        raise ValueError(f"{len(preds)} predictions but {len(labels)} labels")
    if not preds:
        raise ValueError("need at least one prediction")
    p = np.array(preds) == POS
    y = np.array(labels) == POS
    return ConfusionMatrix(
        tp=int(np.sum(p & y)), fp=int(np.sum(p & ~y)), tn=int(np.sum(~p & ~y)), fn=int(np.sum(~p & y))
    )


def _ratio(num: float, den: float) -> float:
    return num / den if den else UNDEFINED


@dataclass(frozen=True)
class MetricsReport:
    """Derived measures; ``nan`` marks a measure whose denominator is zero."""

    acc: float
    balanced_acc: float
    tpr: float
    tnr: float
    ppv: float
    npv: float
    f1_pos: float
    f1_neg: float
    mcc: float

    def to_dict(self) -> dict:
        return {k: (None if math.isnan(v) else v) for k, v in asdict(self).items()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False)

    def row(self) -> str:
        """Aligned table row: Acc, Acc-mu, TPR, TNR, PPV, NPV, F1+, F1-, MCC."""
        cells = [_pct(v) for v in (self.acc, self.balanced_acc, self.tpr, self.tnr, self.ppv,
                                   self.npv, self.f1_pos, self.f1_neg)]
        cells.append("NaN" if math.isnan(self.mcc) else f"{self.mcc:.3f}")
        return " ".join(f"{c:>8}" for c in cells)

    @staticmethod
    def header() -> str:
        names = ("Acc", "Acc-mu", "TPR", "TNR", "PPV", "NPV", "F1+", "F1-", "MCC")
        return " ".join(f"{n:>8}" for n in names)


def _pct(v: float) -> str:
    return "NaN" if math.isnan(v) else f"{100 * v:.2f}%"


def _f1(precision: float, recall: float) -> float:
    if math.isnan(precision) or math.isnan(recall):
        return UNDEFINED
    return _ratio(2 * precision * recall, precision + recall)


def compute_metrics(cm: ConfusionMatrix) -> MetricsReport:
    if cm.total < 1:
        raise ValueError("confusion matrix is empty")
    tp, fp, tn, fn = cm.tp, cm.fp, cm.tn, cm.fn
    tpr = _ratio(tp, tp + fn)
    tnr = _ratio(tn, tn + fp)
    ppv = _ratio(tp, tp + fp)
    npv = _ratio(tn, tn + fn)
    # math.prod of Python ints stays exact before the square root
    den = math.prod((tp + fp, tp + fn, tn + fp, tn + fn))
    mcc = (tp * tn - fp * fn) / math.sqrt(den) if den else UNDEFINED
    return MetricsReport(
        acc=(tp + tn) / cm.total,
        balanced_acc=UNDEFINED if math.isnan(tpr) or math.isnan(tnr) else (tpr + tnr) / 2,
        tpr=tpr,
        tnr=tnr,
        ppv=ppv,
        npv=npv,
        f1_pos=_f1(ppv, tpr),
        f1_neg=_f1(npv, tnr),
        mcc=mcc,
    )


def aggregate_subject(fragment_scores, threshold: float = 0.5) -> str:
    """Average fragment scores into one subject decision; a tie counts as positive."""
    scores = np.asarray(list(fragment_scores), dtype=np.float64)
    if scores.size == 0:
        raise ValueError("need at least one fragment score")
    return POS if scores.mean() >= threshold else NEG
