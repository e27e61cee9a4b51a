"""The two reference baselines: class-distribution random guessing and a
Gale-Church length threshold."""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..core import INVALID, VALID, LabeledUnit, TaskKind, map_label
from ..errors import SingleClass, TaskMismatch
from ..features import cg_z
from ..scoring import weighted_f1_from_counts
from ..text import normalize_ws


@dataclass(frozen=True)
class DummyModel:
    distribution: dict[int, float]
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if abs(sum(self.distribution.values()) - 1.0) > 1e-9:
            raise ValueError("class probabilities must sum to 1")

    def sample(self, n: int) -> list[int]:
        """``n`` i.i.d. draws from the class distribution (same seed, same draws)."""
        classes = sorted(self.distribution)
        weights = [self.distribution[c] for c in classes]
        return random.Random(self.rng_seed).choices(classes, weights=weights, k=n)

    def expected_accuracy(self) -> float:
        return sum(p * p for p in self.distribution.values())


def train_dummy(labels: Sequence[int], seed: int = 0) -> DummyModel:
    if not labels:
        raise ValueError("no labels")
    counts = Counter(int(c) for c in labels)
    n = len(labels)
    return DummyModel({c: counts[c] / n for c in sorted(counts)}, seed)


@dataclass(frozen=True)
class ChurchGaleModel:
    threshold: float
    task: TaskKind = TaskKind.BINARY_II

    def __post_init__(self) -> None:
        if self.threshold < 0:
            raise ValueError("threshold must be non-negative")
        if self.task is not TaskKind.BINARY_II:
            raise TaskMismatch("the length baseline only supports the binary task")

    def predict_score(self, cg: float) -> int:
        return INVALID if cg > self.threshold else VALID

    def predict(self, unit) -> int:
        return self.predict_score(unit_cg_score(unit))


def unit_cg_score(unit) -> float:
    unit = getattr(unit, "unit", unit)
    return cg_z(len(normalize_ws(unit.source_text)), len(normalize_ws(unit.target_text)))


def fit_church_gale(scores: Sequence[float], classes: Sequence[int]) -> ChurchGaleModel:
    """Pick the cut on the length score that maximizes training weighted F1.

    Candidates are the midpoints between consecutive distinct scores plus the
    largest score (everything valid); ties go to the smaller cut.
    """
    y = np.asarray([int(c) for c in classes])
    if len(set(y.tolist())) < 2:
        raise SingleClass("the length baseline needs both valid and invalid units")
    s = np.asarray(scores, dtype=float)
    distinct = np.unique(s)
    cuts = list((distinct[:-1] + distinct[1:]) / 2.0) + [float(distinct[-1])]
    n_invalid = int((y == INVALID).sum())
    n_valid = len(y) - n_invalid
    order = np.argsort(s, kind="stable")
    ss, ys = s[order], y[order]
    best_cut, best_f1 = None, -1.0
    for cut in cuts:
        k = int(np.searchsorted(ss, cut, side="right"))  # predicted valid: first k
        valid_tp = int((ys[:k] == VALID).sum())
        valid_fp = k - valid_tp
        invalid_tp = int((ys[k:] == INVALID).sum())
        invalid_fp = (len(ys) - k) - invalid_tp
        f1 = weighted_f1_from_counts(
            [
                (valid_tp, valid_fp, n_valid - valid_tp, n_valid),
                (invalid_tp, invalid_fp, n_invalid - invalid_tp, n_invalid),
            ]
        )
        if f1 > best_f1:
            best_cut, best_f1 = float(cut), f1
    return ChurchGaleModel(max(0.0, best_cut))


def train_church_gale(units: Sequence[LabeledUnit], task: TaskKind = TaskKind.BINARY_II) -> ChurchGaleModel:
    if task is not TaskKind.BINARY_II:
        raise TaskMismatch("the length baseline only supports the binary task")
    return fit_church_gale([unit_cg_score(u) for u in units], [map_label(u.label, task) for u in units])
