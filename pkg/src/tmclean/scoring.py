"""Confusion matrices and support-weighted precision/recall/F1."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import LengthMismatch


@dataclass(frozen=True)
class ConfusionMatrix:
    classes: tuple[int, ...]
    counts: tuple[tuple[int, ...], ...]  # counts[true][predicted]

    @property
    def total(self) -> int:
        return sum(map(sum, self.counts))

    @property
    def trace(self) -> int:
        return sum(self.counts[i][i] for i in range(len(self.classes)))

    def to_dict(self) -> dict:
        return {"classes": list(self.classes), "counts": [list(r) for r in self.counts]}


@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass
class EvaluationReport:
    per_class: dict[int, ClassScores]
    precision: float
    recall: float
    f1: float
    correctly_classified: int
    n: int
    confusion: ConfusionMatrix
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "weighted": {"precision": self.precision, "recall": self.recall, "f1": self.f1},
            "per_class": {
                str(c): {"precision": s.precision, "recall": s.recall, "f1": s.f1, "support": s.support}
                for c, s in sorted(self.per_class.items())
            },
            "correctly_classified": self.correctly_classified,
            "n": self.n,
            "confusion": self.confusion.to_dict(),
            "meta": self.meta,
        }


def _div(a: float, b: float) -> float:
    return a / b if b else 0.0


def confusion_matrix(true: Sequence[int], pred: Sequence[int], classes: Sequence[int]) -> ConfusionMatrix:
    if len(true) != len(pred):
        raise LengthMismatch(f"{len(true)} true labels vs {len(pred)} predictions")
    classes = tuple(sorted({int(c) for c in classes} | {int(c) for c in true} | {int(c) for c in pred}))
    pos = {c: i for i, c in enumerate(classes)}
    counts = [[0] * len(classes) for _ in classes]
    for t, p in zip(true, pred):
        counts[pos[int(t)]][pos[int(p)]] += 1
    return ConfusionMatrix(classes, tuple(tuple(r) for r in counts))


def report_from_confusion(cm: ConfusionMatrix, meta: dict | None = None) -> EvaluationReport:
    """Per-class and support-weighted scores; zero denominators give 0."""
    k = len(cm.classes)
    n = cm.total
    per_class = {}
    wp = wr = wf = 0.0
    for i, c in enumerate(cm.classes):
        tp = cm.counts[i][i]
        support = sum(cm.counts[i])
        predicted = sum(cm.counts[j][i] for j in range(k))
        p = _div(tp, predicted)
        r = _div(tp, support)
        f = _div(2 * p * r, p + r)
        per_class[c] = ClassScores(p, r, f, support)
        wp += support * p
        wr += support * r
        wf += support * f
    return EvaluationReport(
        per_class, _div(wp, n), _div(wr, n), _div(wf, n), cm.trace, n, cm, dict(meta or {})
    )


def score(
    true: Sequence[int], pred: Sequence[int], classes: Sequence[int] = (), meta: dict | None = None
) -> EvaluationReport:
    if not true:
        raise LengthMismatch("cannot score an empty prediction set")
    return report_from_confusion(confusion_matrix(true, pred, classes), meta)


def weighted_f1_from_counts(tp_fp_fn_support: Sequence[tuple[int, int, int, int]]) -> float:
    """Weighted F1 from per-class (tp, fp, fn, support) tuples."""
    n = sum(s for *_, s in tp_fp_fn_support)
    total = 0.0
    for tp, fp, fn, support in tp_fp_fn_support:
        p = _div(tp, tp + fp)
        r = _div(tp, tp + fn)
        total += support * _div(2 * p * r, p + r)
    return _div(total, n)
