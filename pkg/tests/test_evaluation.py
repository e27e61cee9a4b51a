import json
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tmclean.classifiers import ForestParams, fit_forest
from tmclean.core import FeatureSchema, TaskKind, map_label
from tmclean.errors import LengthMismatch
from tmclean.evaluation import cross_validate, select_features
from tmclean.features import FeatureCache
from tmclean.ingestion import SplitSpec, split
from tmclean.scoring import confusion_matrix, report_from_confusion, score
from tmclean.synthetic import make_corpus

from conftest import lu
from oracles import weighted_f1_oracle


def test_hand_worked_weighted_f1():
    r = score([1, 1, 1, 3], [1, 1, 1, 1], (1, 2, 3))
    assert r.f1 == pytest.approx(0.6429, abs=1e-4)
    assert r.f1 == pytest.approx(float(Fraction(3, 4) * Fraction(6, 7)))
    assert r.correctly_classified == 3


def test_perfect_and_absent_class():
    r = score([0, 1, 1], [0, 1, 1], (0, 1))
    assert (r.precision, r.recall, r.f1, r.correctly_classified) == (1.0, 1.0, 1.0, 3)
    r = score([0, 0], [1, 1], (0, 1))
    assert r.f1 == 0.0


def test_length_mismatch():
    with pytest.raises(LengthMismatch):
        score([0, 1], [0], (0, 1))
    with pytest.raises(LengthMismatch):
        score([], [], (0, 1))


pairs = st.lists(st.tuples(st.integers(1, 3), st.integers(1, 3)), min_size=1, max_size=60)


@given(pairs)
def test_weighted_recall_is_accuracy(ps):
    true, pred = zip(*ps)
    r = score(true, pred, (1, 2, 3))
    assert r.recall == pytest.approx(sum(t == p for t, p in ps) / len(ps))
    assert r.correctly_classified == r.confusion.trace == sum(t == p for t, p in ps)
    assert r.confusion.total == len(ps)
    assert all(0.0 <= m <= 1.0 for m in (r.precision, r.recall, r.f1))
    assert r.f1 == pytest.approx(float(weighted_f1_oracle(true, pred)))


@given(pairs, st.randoms(use_true_random=False))
def test_score_permutation_invariant(ps, rnd):
    shuffled = list(ps)
    rnd.shuffle(shuffled)
    a = score(*zip(*ps), (1, 2, 3))
    b = score(*zip(*shuffled), (1, 2, 3))
    assert a.to_dict() == b.to_dict()


def test_report_from_confusion_matches_score():
    cm = confusion_matrix([0, 1, 1, 0], [0, 1, 0, 0], (0, 1))
    assert report_from_confusion(cm).f1 == score([0, 1, 1, 0], [0, 1, 0, 0], (0, 1)).f1


@pytest.fixture(scope="module")
def corpus():
    return make_corpus(240, seed=5).units


def test_cv_deterministic(corpus, ctx):
    params = ForestParams(n_trees=15, rng_seed=1)
    spec = SplitSpec(repetitions=3, rng_seed=2)
    a = cross_validate(corpus, TaskKind.BINARY_II, FeatureSchema.default(), params, spec, ctx, FeatureCache())
    b = cross_validate(corpus, TaskKind.BINARY_II, FeatureSchema.default(), params, spec, ctx, FeatureCache(), workers=3)
    assert json.dumps(a.to_dict(), sort_keys=True) == json.dumps(b.to_dict(), sort_keys=True)
    assert a.f1 >= 0.95
    assert set(a.baseline_means()) == {"dummy", "church_gale"}
    assert len({r.partition_hash for r in a.repetitions}) == 3


def test_cv_single_repetition_equals_manual_run(corpus, ctx):
    task, schema = TaskKind.FINE_GRAINED, FeatureSchema(("ratio_chars", "cg_score", "mt_bleu", "language_detection"))
    params = ForestParams(n_trees=10, rng_seed=4)
    spec = SplitSpec(repetitions=1, rng_seed=6)
    cv = cross_validate(corpus, task, schema, params, spec, ctx)

    train, test = split(corpus, spec, 0)
    cache = FeatureCache()
    Xtr = cache.matrix(train, ctx, schema.names)
    Xte = cache.matrix(test, ctx, schema.names)
    model = fit_forest(Xtr, [map_label(u.label, task) for u in train], schema, params, task)
    manual = score([map_label(u.label, task) for u in test], [c for c, _ in model.predict_matrix(Xte)], task.class_ids)
    assert cv.f1 == manual.f1 and cv.precision == manual.precision and cv.recall == manual.recall
    assert "church_gale" not in cv.repetitions[0].baselines


def _separable_by_length(n=60, seed=0):
    rng = random.Random(seed)
    out = []
    for i in range(n):
        src = " ".join(rng.choice(["open", "the", "file", "save", "it"]) for _ in range(rng.randint(3, 6)))
        if i % 3 == 0:
            tgt = (src + " ") * 4
            label = 3
        else:
            tgt = src.upper() if rng.random() < 0.5 else src + "!"
            label = rng.choice([1, 2])
        out.append(lu(src, tgt.strip(), label, f"s{i}"))
    return out


def test_select_features_picks_separating_feature(ctx):
    data = _separable_by_length()
    res = select_features(
        data,
        TaskKind.BINARY_II,
        ["punctuation_similarity", "only_capletters_dif", "cg_score"],
        SplitSpec(repetitions=2),
        ctx,
        ForestParams(n_trees=5),
    )
    assert res.selected[0] == "cg_score"
    assert res.selected == ["cg_score"]  # nothing improves on F1 = 1.0
    assert res.f1 == 1.0
    assert res.reference["features"] == list(FeatureSchema.default().names)
    assert 0.0 <= res.reference["f1"] <= 1.0
