import json
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tmclean.classifiers import (
    ChurchGaleModel,
    ForestParams,
    Leaf,
    Split,
    bootstrap_indices,
    fit_church_gale,
    fit_forest,
    load_model,
    model_from_json,
    model_to_json,
    predict,
    save_model,
    train_church_gale,
    train_dummy,
    train_forest,
)
from tmclean.classifiers.tree import grow_tree, preorder
from tmclean.core import FeatureSchema, FeatureVector, TaskKind
from tmclean.errors import CorruptModel, SchemaMismatch, SingleClass, TaskMismatch, VersionMismatch
from tmclean.seeds import derive_seed, splitmix64

from conftest import lu
from oracles import cart_oracle, cart_predict


def schema(d):
    return FeatureSchema(tuple(f"f{i}" for i in range(d)))


DEBUG = dict(n_trees=1, bootstrap=False)


def random_dataset(rng, n_max=64, d_max=4, n_classes=None):
    n = rng.randint(2, n_max)
    d = rng.randint(1, d_max)
    k = n_classes or rng.choice([2, 3])
    X = [[rng.randint(0, 5) for _ in range(d)] for _ in range(n)]
    y = [rng.randrange(k) for _ in range(n)]
    if len(set(y)) < 2:
        y[0], y[-1] = 0, 1
    return X, y


def test_splitmix64_reference_values():
    # first outputs of the reference generator seeded with 0
    assert splitmix64(0) == 0xE220A8397B1DCDAF
    assert splitmix64(0x9E3779B97F4A7C15) == 0x6E789E6AA1B965F4
    assert derive_seed(5, 0) != derive_seed(5, 1)


def test_single_tree_equals_plain_cart():
    rng = random.Random(2024)
    for _ in range(50):
        X, y = random_dataset(rng)
        d = len(X[0])
        classes = sorted(set(y))
        model = fit_forest(np.array(X, float), y, schema(d), ForestParams(features_per_split=d, **DEBUG))
        oracle = cart_oracle([tuple(map(float, r)) for r in X], y, classes)
        probes = X + [[rng.uniform(-1, 6) for _ in range(d)] for _ in range(30)]
        for x in probes:
            assert model.predict_values([float(v) for v in x])[0] == cart_predict(oracle, x)


def _structure(node):
    if isinstance(node, Leaf):
        return ("leaf",)
    return ("split", node.feature, node.threshold, _structure(node.left), _structure(node.right))


def _oracle_structure(node):
    if node[0] == "leaf":
        return ("leaf",)
    return ("split", node[1], node[2], _oracle_structure(node[3]), _oracle_structure(node[4]))


def test_single_tree_structure_equals_cart():
    rng = random.Random(99)
    for _ in range(50):
        X, y = random_dataset(rng)
        d = len(X[0])
        model = fit_forest(np.array(X, float), y, schema(d), ForestParams(features_per_split=d, **DEBUG))
        oracle = cart_oracle([tuple(map(float, r)) for r in X], y, sorted(set(y)))
        assert _structure(model.trees[0]) == _oracle_structure(oracle)


def test_tie_breaks_lower_feature_then_lower_threshold():
    # both features separate perfectly; feature 0 must win
    X = np.array([[0, 0], [1, 1], [2, 2], [3, 3]], float)
    y = [0, 0, 1, 1]
    tree = fit_forest(X, y, schema(2), ForestParams(**DEBUG)).trees[0]
    assert isinstance(tree, Split) and tree.feature == 0 and tree.threshold == 1.5
    # symmetric data: cuts at 0.5 and 2.5 score the same, lower threshold wins
    X = np.array([[0], [1], [2], [3]], float)
    tree = fit_forest(X, [1, 0, 0, 1], schema(1), ForestParams(**DEBUG)).trees[0]
    assert tree.threshold == 0.5


def test_gini_split_invariants():
    rng = random.Random(7)
    for _ in range(20):
        X, y = random_dataset(rng)
        model = fit_forest(np.array(X, float), y, schema(len(X[0])), ForestParams(n_trees=5, rng_seed=3))
        for tree in model.trees:
            for node in preorder(tree):
                if isinstance(node, Split):
                    left = _leaf_total(node.left)
                    right = _leaf_total(node.right)
                    parent = [a + b for a, b in zip(left, right)]
                    assert sum(left) > 0 and sum(right) > 0
                    assert np.count_nonzero(parent) > 1  # pure nodes never split
                    assert _weighted_gini(left, right) < _gini(parent)


def _leaf_total(node):
    leaves = [n for n in preorder(node) if isinstance(n, Leaf)]
    return [sum(c) for c in zip(*(l.counts for l in leaves))]


def _gini(c):
    n = sum(c)
    return 1 - sum((k / n) ** 2 for k in c)


def _weighted_gini(l, r):
    n = sum(l) + sum(r)
    return sum(l) / n * _gini(l) + sum(r) / n * _gini(r)


def test_min_leaf_and_max_depth():
    rng = random.Random(11)
    X, y = random_dataset(rng, n_max=64)
    X = np.array(X, float)
    model = fit_forest(X, y, schema(X.shape[1]), ForestParams(n_trees=3, min_leaf_size=5, max_depth=2))
    for tree in model.trees:
        for node in preorder(tree):
            if isinstance(node, Leaf):
                assert sum(node.counts) >= 5 or node is tree
    stump = fit_forest(X, y, schema(X.shape[1]), ForestParams(n_trees=1, max_depth=0))
    assert isinstance(stump.trees[0], Leaf)


def separable(n=200, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.uniform(-1, 1, size=(n, 2))
    y = (X[:, 0] + 0.5 * X[:, 1] > 0).astype(int).tolist()
    return X, y


def test_separable_training_accuracy():
    X, y = separable()
    model = fit_forest(X, y, schema(2), ForestParams(n_trees=50, rng_seed=1))
    pred = [c for c, _ in model.predict_matrix(X)]
    assert pred == y


def test_determinism_and_roundtrip(tmp_path):
    X, y = separable(120, seed=4)
    a = fit_forest(X, y, schema(2), ForestParams(n_trees=20, rng_seed=9), TaskKind.BINARY_II)
    b = fit_forest(X, y, schema(2), ForestParams(n_trees=20, rng_seed=9), TaskKind.BINARY_II)
    assert model_to_json(a) == model_to_json(b)
    save_model(a, tmp_path / "m.json")
    loaded = load_model(tmp_path / "m.json")
    assert model_to_json(loaded) == model_to_json(a)
    probe = np.random.default_rng(0).uniform(-1, 1, (200, 2))
    assert loaded.predict_matrix(probe) == a.predict_matrix(probe)


def test_model_file_shape(tmp_path):
    X, y = separable(40)
    model = fit_forest(X, y, schema(2), ForestParams(n_trees=2), TaskKind.BINARY_II)
    doc = json.loads(model_to_json(model))
    assert set(doc) == {"format_version", "task", "schema", "hyperparameters", "class_ids", "trees", "checksum"}
    assert doc["task"] == "binary-ii" and doc["class_ids"] == [0, 1]


def test_model_file_errors():
    X, y = separable(40)
    text = model_to_json(fit_forest(X, y, schema(2), ForestParams(n_trees=2)))
    doc = json.loads(text)
    doc["format_version"] = 999
    with pytest.raises(VersionMismatch):
        model_from_json(json.dumps(doc))
    with pytest.raises(CorruptModel):
        model_from_json(text[: len(text) // 2])
    tampered = json.loads(text)
    tampered["hyperparameters"]["rng_seed"] = 12345
    with pytest.raises(CorruptModel):
        model_from_json(json.dumps(tampered))


def test_bootstrap_reproducible_and_distinct():
    p = ForestParams(rng_seed=5)
    assert bootstrap_indices(p, 50, 3) == bootstrap_indices(p, 50, 3)
    draws = [tuple(bootstrap_indices(p, 50, t)) for t in range(20)]
    assert len(set(draws)) == 20


def test_probabilities_are_vote_shares():
    X, y = separable(80, seed=2)
    model = fit_forest(X, y, schema(2), ForestParams(n_trees=7, rng_seed=2))
    for _, probs in model.predict_matrix(np.random.default_rng(1).uniform(-1, 1, (50, 2))):
        assert abs(sum(probs.values()) - 1.0) < 1e-9
        assert all(abs(p * 7 - round(p * 7)) < 1e-9 for p in probs.values())


def test_tie_goes_to_smaller_class():
    X = np.array([[0.0], [1.0]])
    model = fit_forest(X, [0, 1], schema(1), ForestParams(n_trees=1, bootstrap=False))
    model.trees = [Leaf((0, 1)), Leaf((1, 0))]
    assert model.predict_values([0.5]) == (0, {0: 0.5, 1: 0.5})


def test_single_tree_forest_predicts_leaf_majority():
    X, y = separable(30)
    model = fit_forest(X, y, schema(2), ForestParams(n_trees=1, rng_seed=3))
    from tmclean.classifiers.tree import route

    for x in X.tolist():
        assert model.predict_values(x)[0] == route(model.trees[0], x).majority


def test_training_errors():
    with pytest.raises(SingleClass):
        fit_forest(np.zeros((4, 1)), [1, 1, 1, 1], schema(1))
    with pytest.raises(SchemaMismatch):
        fit_forest(np.zeros((4, 2)), [0, 1, 0, 1], schema(3))
    vecs = [(FeatureVector(schema(1), (0.0,)), 0), (FeatureVector(FeatureSchema(("g",)), (1.0,)), 1)]
    with pytest.raises(SchemaMismatch):
        train_forest(vecs)
    model = train_forest([(FeatureVector(schema(1), (float(i),)), i % 2) for i in range(6)], ForestParams(n_trees=3))
    with pytest.raises(SchemaMismatch):
        predict(model, FeatureVector(FeatureSchema(("other",)), (0.0,)))


def test_fine_grained_classes():
    rng = np.random.default_rng(3)
    X = rng.uniform(0, 3, (90, 1))
    y = (np.floor(X[:, 0]).astype(int) + 1).tolist()
    model = fit_forest(X, y, schema(1), ForestParams(n_trees=15), TaskKind.FINE_GRAINED)
    assert model.class_ids == (1, 2, 3)
    assert [c for c, _ in model.predict_matrix(X)] == y


# -- baselines ------------------------------------------------------------------


def test_dummy_distribution():
    m = train_dummy([0] * 85 + [1] * 15, seed=1)
    assert m.distribution == {0: 0.85, 1: 0.15}
    assert m.expected_accuracy() == pytest.approx(0.745)
    assert set(train_dummy([1, 1, 1]).sample(100)) == {1}
    assert m.sample(50) == train_dummy([0] * 85 + [1] * 15, seed=1).sample(50)


def test_church_gale_separable():
    scores = [0.1, 0.5, 0.9, 2.1, 2.5, 3.0]
    m = fit_church_gale(scores, [0, 0, 0, 1, 1, 1])
    assert 0.9 < m.threshold < 2.1
    assert [m.predict_score(s) for s in scores] == [0, 0, 0, 1, 1, 1]


def test_church_gale_constant_scores():
    m = fit_church_gale([1.5] * 4, [0, 1, 0, 1])
    assert m.threshold == 1.5
    assert m.predict_score(1.5) == 0


def test_church_gale_matches_brute_force():
    from oracles import weighted_f1_oracle

    rng = random.Random(8)
    for _ in range(30):
        scores = [rng.choice([0.0, 0.5, 1.0, 1.5, 2.0, 3.0]) for _ in range(25)]
        y = [rng.randrange(2) for _ in range(25)]
        if len(set(y)) < 2:
            continue
        m = fit_church_gale(scores, y)
        best = max(weighted_f1_oracle(y, [int(s > t) for s in scores]) for t in sorted(set(scores)))
        got = weighted_f1_oracle(y, [m.predict_score(s) for s in scores])
        assert got == best


def test_church_gale_task_and_class_checks():
    with pytest.raises(TaskMismatch):
        ChurchGaleModel(1.0, TaskKind.FINE_GRAINED)
    with pytest.raises(TaskMismatch):
        train_church_gale([lu("a", "b", 1)], TaskKind.FINE_GRAINED)
    with pytest.raises(SingleClass):
        train_church_gale([lu("a", "b", 1), lu("aa", "b", 2)])
    m = train_church_gale([lu("abc", "abd", 1, "1"), lu("abc", "a much longer target text", 3, "2")])
    assert m.predict(lu("xyz", "xyw", 1)) == 0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32), st.integers(2, 40))
def test_forest_seed_determinism_property(seed, n):
    rng = np.random.default_rng(seed % 1000)
    X = rng.integers(0, 4, (n, 3)).astype(float)
    y = [i % 2 for i in range(n)]
    p = ForestParams(n_trees=4, rng_seed=seed)
    a = fit_forest(X, y, schema(3), p)
    b = fit_forest(X, y, schema(3), p)
    assert model_to_json(a) == model_to_json(b)
    for tree in a.trees:
        assert all(n.feature < 3 for n in preorder(tree) if isinstance(n, Split))
