"""Repeated stratified 2/3-1/3 cross-validation and forward feature selection."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from statistics import fmean
from typing import Sequence

import numpy as np

from .classifiers import ForestParams, fit_church_gale, fit_forest, train_dummy, unit_cg_score
from .core import FeatureSchema, LabeledUnit, TaskKind, map_label
from .errors import TmcleanError
from .features import FeatureCache, FeatureContext, provider_fingerprint
from .ingestion import SplitSpec, partition_dump, partition_hash, split_indices
from .scoring import ConfusionMatrix, EvaluationReport, confusion_matrix, report_from_confusion, score

log = logging.getLogger(__name__)

IMPROVEMENT_TOL = 1e-4

__all__ = [
    "ConfusionMatrix",
    "CVResult",
    "EvaluationReport",
    "SelectionResult",
    "confusion_matrix",
    "cross_validate",
    "report_from_confusion",
    "score",
    "select_features",
]


@dataclass
class RepetitionResult:
    index: int
    partition_hash: str
    report: EvaluationReport
    baselines: dict[str, EvaluationReport] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "partition_hash": self.partition_hash,
            "report": self.report.to_dict(),
            "baselines": {k: v.to_dict() for k, v in sorted(self.baselines.items())},
        }


@dataclass
class CVResult:
    precision: float
    recall: float
    f1: float
    repetitions: list[RepetitionResult]
    meta: dict = field(default_factory=dict)

    def baseline_means(self) -> dict[str, dict[str, float]]:
        names = sorted({k for r in self.repetitions for k in r.baselines})
        return {
            name: {
                m: fmean(getattr(r.baselines[name], m) for r in self.repetitions)
                for m in ("precision", "recall", "f1")
            }
            for name in names
        }

    def to_dict(self) -> dict:
        return {
            "averaged": {"precision": self.precision, "recall": self.recall, "f1": self.f1},
            "baselines_averaged": self.baseline_means(),
            "correctly_classified": [r.report.correctly_classified for r in self.repetitions],
            "repetitions": [r.to_dict() for r in self.repetitions],
            "meta": self.meta,
        }


def _run_repetition(
    index: int,
    dataset: Sequence[LabeledUnit],
    X: np.ndarray,
    y: np.ndarray,
    task: TaskKind,
    schema: FeatureSchema,
    params: ForestParams,
    spec: SplitSpec,
    baselines: bool,
) -> RepetitionResult:
    try:
        train, test = split_indices([int(lu.label) for lu in dataset], spec, index)
        model = fit_forest(X[train], y[train], schema, params, task)
        pred = [c for c, _ in model.predict_matrix(X[test])]
        truth = y[test].tolist()
        classes = task.class_ids
        report = score(truth, pred, classes, {"repetition": index, "n_train": len(train), "n_test": len(test)})
        extra = {}
        if baselines:
            dummy = train_dummy(y[train].tolist(), seed=spec.rng_seed + index)
            extra["dummy"] = score(truth, dummy.sample(len(test)), classes)
            if task is TaskKind.BINARY_II:
                cg = [unit_cg_score(dataset[i]) for i in range(len(dataset))]
                length_model = fit_church_gale([cg[i] for i in train], y[train].tolist())
                extra["church_gale"] = score(truth, [length_model.predict_score(cg[i]) for i in test], classes)
    except TmcleanError as exc:
        raise type(exc)(f"repetition {index}: {exc}") from exc
    train_units = [dataset[i] for i in train]
    digest = partition_hash(partition_dump(dataset, train_units))
    return RepetitionResult(index, digest, report, extra)


def cross_validate(
    dataset: Sequence[LabeledUnit],
    task: TaskKind,
    schema: FeatureSchema,
    params: ForestParams,
    spec: SplitSpec,
    ctx: FeatureContext,
    cache: FeatureCache | None = None,
    workers: int = 1,
    baselines: bool = True,
) -> CVResult:
    """Average weighted P/R/F1 over ``spec.repetitions`` stratified splits.

    Features are extracted once for the whole dataset (through ``cache``);
    the baselines are scored on the same splits as the forest.
    """
    cache = cache if cache is not None else FeatureCache()
    X = cache.matrix(dataset, ctx, schema.names, workers)
    y = np.array([map_label(lu.label, task) for lu in dataset], dtype=np.int64)
    return cross_validate_matrix(dataset, X, y, task, schema, params, spec, workers, baselines, ctx)


def cross_validate_matrix(
    dataset: Sequence[LabeledUnit],
    X: np.ndarray,
    y: np.ndarray,
    task: TaskKind,
    schema: FeatureSchema,
    params: ForestParams,
    spec: SplitSpec,
    workers: int = 1,
    baselines: bool = True,
    ctx: FeatureContext | None = None,
) -> CVResult:
    def run(i: int) -> RepetitionResult:
        return _run_repetition(i, dataset, X, y, task, schema, params, spec, baselines)

    indices = range(spec.repetitions)
    if workers > 1 and spec.repetitions > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reps = list(pool.map(run, indices))
    else:
        reps = [run(i) for i in indices]
    meta = {
        "task": task.value,
        "schema": schema.to_dict(),
        "hyperparameters": asdict(params),
        "split": asdict(spec),
        "n": len(dataset),
    }
    if ctx is not None:
        meta["providers"] = {n: provider_fingerprint(n, ctx) for n in schema.names}
    return CVResult(
        fmean(r.report.precision for r in reps),
        fmean(r.report.recall for r in reps),
        fmean(r.report.f1 for r in reps),
        reps,
        meta,
    )


@dataclass
class SelectionStep:
    added: str
    f1: float
    candidates: dict[str, float]  # every feature tried at this step and its CV F1


@dataclass
class SelectionResult:
    steps: list[SelectionStep]
    selected: list[str]
    f1: float
    reference: dict[str, float | list[str]]

    def to_dict(self) -> dict:
        return {
            "selected": self.selected,
            "f1": self.f1,
            "steps": [asdict(s) for s in self.steps],
            "reference": self.reference,
        }


def select_features(
    dataset: Sequence[LabeledUnit],
    task: TaskKind,
    candidates: Sequence[str],
    spec: SplitSpec,
    ctx: FeatureContext,
    params: ForestParams = ForestParams(),
    cache: FeatureCache | None = None,
    reference: Sequence[str] | None = None,
    workers: int = 1,
) -> SelectionResult:
    """Greedy forward selection on cross-validated weighted F1.

    Starts from the empty set and adds the best remaining feature while it
    improves F1 by more than ``IMPROVEMENT_TOL``. ``reference`` (default: the
    nine-feature default schema) is scored on the same splits for comparison.
    """
    if not candidates:
        raise ValueError("need at least one candidate feature")
    reference = list(reference or FeatureSchema.default().names)
    names = list(dict.fromkeys(list(candidates) + reference))
    cache = cache if cache is not None else FeatureCache()
    full = cache.matrix(dataset, ctx, names, workers)
    col = {n: i for i, n in enumerate(names)}
    y = np.array([map_label(lu.label, task) for lu in dataset], dtype=np.int64)

    def cv_f1(subset: Sequence[str]) -> float:
        X = full[:, [col[n] for n in subset]]
        res = cross_validate_matrix(dataset, X, y, task, FeatureSchema(tuple(subset)), params, spec, workers, False)
        return res.f1

    selected: list[str] = []
    current = 0.0
    steps: list[SelectionStep] = []
    remaining = list(dict.fromkeys(candidates))
    while remaining:
        tried = {n: cv_f1(selected + [n]) for n in remaining}
        best = max(remaining, key=lambda n: (tried[n], -remaining.index(n)))
        if tried[best] - current <= IMPROVEMENT_TOL:
            break
        selected.append(best)
        remaining.remove(best)
        current = tried[best]
        steps.append(SelectionStep(best, current, tried))
        log.info("selected %s (weighted F1 %.4f)", best, current)
    return SelectionResult(steps, selected, current, {"features": reference, "f1": cv_f1(reference)})
