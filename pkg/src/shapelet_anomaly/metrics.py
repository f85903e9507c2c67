"""Confusion matrix and per-class precision / recall / F1."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import ClassLabel
from .errors import LengthMismatch


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """Rows are actual classes, columns predicted, both in ascending id order."""

    labels: tuple
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def to_csv(self) -> str:
        names = [ClassLabel(int(c)).label_name for c in self.labels]
        lines = ["actual\\predicted," + ",".join(names)]
        for name, row in zip(names, self.counts):
            lines.append(name + "," + ",".join(str(int(v)) for v in row))
        return "\n".join(lines) + "\n"


def confusion_matrix(actual: Sequence, predicted: Sequence, labels: Sequence | None = None) -> ConfusionMatrix:
    """``counts[a][p]`` = number of instances of class *a* predicted as *p*.

    *labels* defaults to the union of classes seen in either sequence.
    """
    if len(actual) != len(predicted):
        raise LengthMismatch(f"{len(actual)} actual vs {len(predicted)} predicted labels")
    if len(actual) == 0:
        raise LengthMismatch("at least one prediction is required")
    act = [ClassLabel.parse(a) for a in actual]
    pred = [ClassLabel.parse(p) for p in predicted]
    if labels is None:
        labels = sorted(set(act) | set(pred))
    else:
        labels = sorted({ClassLabel.parse(c) for c in labels} | set(act) | set(pred))
    pos = {c: i for i, c in enumerate(labels)}
    counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for a, p in zip(act, pred):
        counts[pos[a], pos[p]] += 1
    return ConfusionMatrix(tuple(labels), counts)


def _ratio(num, den):
    return (num / den, False) if den else (0.0, True)


@dataclass(frozen=True)
class ClassMetrics:
    label: ClassLabel
    precision: float
    recall: float
    f1: float
    support: int
    tp: int
    fp: int
    fn: int
    tn: int
    accuracy: float  # one-vs-rest
    undefined: tuple = field(default=())

    def to_dict(self) -> dict:
        return {
            "id": int(self.label),
            "name": self.label.label_name,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "support": self.support,
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "tn": self.tn,
            "one_vs_rest_accuracy": self.accuracy,
            "undefined": list(self.undefined),
        }


@dataclass(frozen=True)
class ClassificationReport:
    per_class: tuple
    accuracy: float
    total: int

    def recall_of(self, label) -> float:
        label = ClassLabel.parse(label)
        return next(m.recall for m in self.per_class if m.label == label)

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "total": self.total,
            "classes": [m.to_dict() for m in self.per_class],
        }

    def to_text(self) -> str:
        head = f"{'class':<10}{'precision':>10}{'recall':>10}{'f1':>10}{'support':>10}"
        lines = [head, "-" * len(head)]
        for m in self.per_class:
            flag = " *" if m.undefined else ""
            lines.append(
                f"{m.label.label_name:<10}{m.precision:>10.4f}{m.recall:>10.4f}"
                f"{m.f1:>10.4f}{m.support:>10d}{flag}"
            )
        lines.append("-" * len(head))
        lines.append(f"{'accuracy':<10}{self.accuracy:>30.4f}{self.total:>10d}")
        if any(m.undefined for m in self.per_class):
            lines.append("* some ratios were 0/0 and are reported as 0")
        return "\n".join(lines) + "\n"


def classification_report(cm: ConfusionMatrix) -> ClassificationReport:
    """One-vs-rest precision, recall and F1 per class plus overall accuracy.

    Overall accuracy is the trace divided by the total. Ratios with a zero
    denominator are reported as 0 and listed in ``undefined``.
    """
    counts = cm.counts
    total = int(counts.sum())
    if total < 1:
        raise LengthMismatch("confusion matrix is empty")
    per_class = []
    for k, label in enumerate(cm.labels):
        tp = int(counts[k, k])
        fp = int(counts[:, k].sum()) - tp
        fn = int(counts[k, :].sum()) - tp
        tn = total - tp - fp - fn
        undefined = []
        precision, bad = _ratio(tp, tp + fp)
        if bad:
            undefined.append("precision")
        recall, bad = _ratio(tp, tp + fn)
        if bad:
            undefined.append("recall")
        f1, bad = _ratio(2 * precision * recall, precision + recall)
        if bad:
            undefined.append("f1")
        per_class.append(
            ClassMetrics(
                label=ClassLabel(int(label)),
                precision=precision,
                recall=recall,
                f1=f1,
                support=tp + fn,
                tp=tp,
                fp=fp,
                fn=fn,
                tn=tn,
                accuracy=(tp + tn) / total,
                undefined=tuple(undefined),
            )
        )
    return ClassificationReport(tuple(per_class), int(np.trace(counts)) / total, total)
