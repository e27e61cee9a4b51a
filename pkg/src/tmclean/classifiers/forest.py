"""Random forest: bagged CART trees with per-split feature subsampling."""

from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .._io import atomic_write
from ..core import FeatureSchema, FeatureVector, TaskKind
from ..errors import CorruptModel, ModelFileError, SchemaMismatch, SingleClass, VersionMismatch
from ..seeds import derive_seed
from .tree import Leaf, Node, Split, grow_tree, preorder, route

FORMAT_VERSION = 1


@dataclass(frozen=True)
class ForestParams:
    n_trees: int = 100
    max_depth: int | None = None
    min_leaf_size: int = 1
    features_per_split: int | None = None  # None: ceil(sqrt(d))
    rng_seed: int = 0
    bootstrap: bool = True  # False only for debugging against plain CART

    def __post_init__(self) -> None:
        if self.n_trees < 1:
            raise ValueError("n_trees must be at least 1")
        if self.min_leaf_size < 1:
            raise ValueError("min_leaf_size must be at least 1")
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError("max_depth must be non-negative")

    def resolved_features(self, d: int) -> int:
        if self.features_per_split is None:
            return max(1, math.ceil(math.sqrt(d)))
        return min(max(1, self.features_per_split), d)


@dataclass
class ForestModel:
    trees: list[Node]
    schema: FeatureSchema
    task: TaskKind | None
    params: ForestParams
    class_ids: tuple[int, ...]

    @property
    def n_trees(self) -> int:
        return len(self.trees)

    def _check(self, schema: FeatureSchema) -> None:
        if schema.names != self.schema.names:
            raise SchemaMismatch(f"model expects {list(self.schema.names)}, got {list(schema.names)}")

    def votes(self, x: Sequence[float]) -> list[int]:
        counts = [0] * len(self.class_ids)
        for tree in self.trees:
            counts[route(tree, x).majority] += 1
        return counts

    def predict_values(self, x: Sequence[float]) -> tuple[int, dict[int, float]]:
        counts = self.votes(x)
        best = max(range(len(counts)), key=lambda i: (counts[i], -i))
        probs = {c: n / self.n_trees for c, n in zip(self.class_ids, counts)}
        return self.class_ids[best], probs

    def predict_matrix(self, X: np.ndarray) -> list[tuple[int, dict[int, float]]]:
        if X.ndim != 2 or X.shape[1] != len(self.schema):
            raise SchemaMismatch(f"expected {len(self.schema)} feature columns")
        return [self.predict_values(row) for row in X.tolist()]


def predict(model: ForestModel, vector: FeatureVector) -> tuple[int, dict[int, float]]:
    """Majority vote over trees; ties go to the smaller class id."""
    model._check(vector.schema)
    return model.predict_values(vector.values)


def fit_forest(
    X: np.ndarray,
    y: Sequence[int],
    schema: FeatureSchema,
    params: ForestParams = ForestParams(),
    task: TaskKind | None = None,
    class_ids: Sequence[int] | None = None,
) -> ForestModel:
    """Train on a feature matrix whose columns follow ``schema``.

    Tree ``t`` uses its own ``random.Random(derive_seed(seed, t))`` for the
    bootstrap draw (N rows with replacement) and the feature subsets.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != len(schema):
        raise SchemaMismatch(f"matrix has {X.shape[-1] if X.ndim else 0} columns, schema has {len(schema)}")
    if not np.isfinite(X).all():
        raise ValueError("feature matrix contains non-finite values")
    labels = [int(c) for c in y]
    if len(labels) != X.shape[0]:
        raise ValueError("X and y differ in length")
    present = sorted(set(labels))
    if len(present) < 2:
        raise SingleClass(f"training data has a single class: {present}")
    if class_ids is None:
        class_ids = task.class_ids if task is not None else tuple(present)
    class_ids = tuple(int(c) for c in class_ids)
    unknown = set(present) - set(class_ids)
    if unknown:
        raise ValueError(f"labels {sorted(unknown)} not among classes {class_ids}")
    pos = {c: i for i, c in enumerate(class_ids)}
    yi = np.array([pos[c] for c in labels], dtype=np.int64)
    n, d = X.shape
    k = params.resolved_features(d)
    trees: list[Node] = []
    for t in range(params.n_trees):
        rng = random.Random(derive_seed(params.rng_seed, t))
        sample = [rng.randrange(n) for _ in range(n)] if params.bootstrap else list(range(n))
        trees.append(
            grow_tree(X, yi, sample, len(class_ids), params.max_depth, params.min_leaf_size, k, rng)
        )
    return ForestModel(trees, schema, task, params, class_ids)


def train_forest(
    samples: Sequence[tuple[FeatureVector, int]],
    params: ForestParams = ForestParams(),
    task: TaskKind | None = None,
) -> ForestModel:
    if not samples:
        raise SingleClass("no training data")
    schema = samples[0][0].schema
    for vec, _ in samples:
        if vec.schema.names != schema.names:
            raise SchemaMismatch("training vectors use different schemas")
    X = np.array([vec.values for vec, _ in samples], dtype=float)
    return fit_forest(X, [c for _, c in samples], schema, params, task)


def bootstrap_indices(params: ForestParams, n: int, tree_index: int) -> list[int]:
    """The bootstrap draw tree ``tree_index`` makes (for audits and tests)."""
    rng = random.Random(derive_seed(params.rng_seed, tree_index))
    return [rng.randrange(n) for _ in range(n)]


# -- serialization -------------------------------------------------------------


def _encode_tree(root: Node) -> list:
    out = []
    for node in preorder(root):
        if isinstance(node, Leaf):
            out.append({"counts": list(node.counts)})
        else:
            out.append({"feature": node.feature, "threshold": node.threshold})
    return out


def _decode_tree(nodes: list, n_features: int, n_classes: int) -> Node:
    it = iter(nodes)

    def take() -> Node:
        raw = next(it)
        if "counts" in raw:
            counts = tuple(int(c) for c in raw["counts"])
            if len(counts) != n_classes:
                raise CorruptModel("leaf has the wrong number of class counts")
            return Leaf(counts)
        f = int(raw["feature"])
        if not 0 <= f < n_features:
            raise CorruptModel(f"split on feature {f} outside the schema")
        return Split(f, float(raw["threshold"]), None, None)  # type: ignore[arg-type]

    # pre-order rebuild without recursion
    root = take()
    stack = [(root, "left")] if isinstance(root, Split) else []
    while stack:
        parent, side = stack.pop()
        child = take()
        setattr(parent, side, child)
        if side == "left":
            stack.append((parent, "right"))
        if isinstance(child, Split):
            stack.append((child, "left"))
    if next(it, None) is not None:
        raise CorruptModel("trailing nodes after tree end")
    return root


def _canonical(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def model_to_json(model: ForestModel) -> str:
    doc = {
        "format_version": FORMAT_VERSION,
        "task": model.task.value if model.task is not None else None,
        "schema": model.schema.to_dict(),
        "hyperparameters": asdict(model.params),
        "class_ids": list(model.class_ids),
        "trees": [_encode_tree(t) for t in model.trees],
    }
    doc["checksum"] = hashlib.sha256(_canonical(doc).encode("utf-8")).hexdigest()
    return _canonical(doc) + "\n"


def model_from_json(text: str) -> ForestModel:
    try:
        doc = json.loads(text)
    except ValueError as exc:
        raise CorruptModel(f"model file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "format_version" not in doc:
        raise CorruptModel("model file lacks a format_version")
    if doc["format_version"] != FORMAT_VERSION:
        raise VersionMismatch(f"model format {doc['format_version']!r}, expected {FORMAT_VERSION}")
    checksum = doc.pop("checksum", None)
    if checksum != hashlib.sha256(_canonical(doc).encode("utf-8")).hexdigest():
        raise CorruptModel("model checksum mismatch")
    try:
        schema = FeatureSchema.from_dict(doc["schema"])
        class_ids = tuple(int(c) for c in doc["class_ids"])
        params = ForestParams(**doc["hyperparameters"])
        task = TaskKind(doc["task"]) if doc["task"] is not None else None
        trees = [_decode_tree(t, len(schema), len(class_ids)) for t in doc["trees"]]
    except (KeyError, TypeError, ValueError, StopIteration) as exc:
        raise CorruptModel(f"malformed model document: {exc}") from exc
    if not trees:
        raise CorruptModel("model has no trees")
    return ForestModel(trees, schema, task, params, class_ids)


def save_model(model: ForestModel, path: str | Path) -> None:
    try:
        atomic_write(path, model_to_json(model))
    except OSError as exc:
        raise ModelFileError(f"cannot write model to {path}: {exc}") from exc


def load_model(path: str | Path) -> ForestModel:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ModelFileError(f"cannot read model {path}: {exc}") from exc
    return model_from_json(text)
