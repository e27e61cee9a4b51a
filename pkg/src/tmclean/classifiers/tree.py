"""CART decision trees with Gini impurity.

Split quality is compared exactly. For a candidate split of a node with
class counts ``c`` into children L and R, minimizing weighted Gini
impurity is the same as maximizing ``sum(cL**2)/nL + sum(cR**2)/nR``.
That quantity is rational, so near-ties found in floating point are
settled with :class:`fractions.Fraction`. Remaining ties go to the lower
feature index, then the lower threshold.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

_NEAR = 1e-9


@dataclass
class Leaf:
    counts: tuple[int, ...]

    @property
    def majority(self) -> int:
        """Index of the most frequent class; ties go to the lower index."""
        return max(range(len(self.counts)), key=lambda i: (self.counts[i], -i))


@dataclass
class Split:
    feature: int
    threshold: float
    left: "Node"
    right: "Node"


Node = Union[Leaf, Split]


def route(node: Node, x: Sequence[float]) -> Leaf:
    while isinstance(node, Split):
        node = node.left if x[node.feature] <= node.threshold else node.right
    return node


def _midpoint(a: float, b: float) -> float:
    mid = a / 2.0 + b / 2.0
    return mid if a <= mid < b else a


def best_split_on_feature(
    values: np.ndarray, y: np.ndarray, n_classes: int, min_leaf: int
) -> tuple[Fraction, float] | None:
    """Best (score, threshold) for one feature, or None if no admissible cut."""
    n = len(values)
    order = np.argsort(values, kind="stable")
    sv = values[order]
    onehot = np.zeros((n, n_classes), dtype=np.int64)
    onehot[np.arange(n), y[order]] = 1
    left = np.cumsum(onehot, axis=0)[:-1]
    total = onehot.sum(axis=0)
    nl = np.arange(1, n, dtype=np.int64)
    ok = (sv[:-1] < sv[1:]) & (nl >= min_leaf) & (n - nl >= min_leaf)
    if not ok.any():
        return None
    cand = np.flatnonzero(ok)
    lc = left[cand]
    rc = total - lc
    a = (lc * lc).sum(axis=1)
    b = (rc * rc).sum(axis=1)
    nlc = nl[cand]
    nrc = n - nlc
    score = a / nlc + b / nrc
    top = score.max()
    near = np.flatnonzero(score >= top - _NEAR * max(1.0, abs(top)))
    best_i, best_q = -1, None
    for j in near:  # ascending position = ascending threshold
        q = Fraction(int(a[j]) * int(nrc[j]) + int(b[j]) * int(nlc[j]), int(nlc[j]) * int(nrc[j]))
        if best_q is None or q > best_q:
            best_i, best_q = j, q
    i = int(cand[best_i])
    return best_q, _midpoint(float(sv[i]), float(sv[i + 1]))


def grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    sample: Sequence[int] | np.ndarray,
    n_classes: int,
    max_depth: int | None = None,
    min_leaf_size: int = 1,
    features_per_split: int | None = None,
    rng: random.Random | None = None,
) -> Node:
    """Grow one tree on ``X[sample]`` (``sample`` may repeat rows).

    ``y`` holds class indices ``0..n_classes-1``. When ``features_per_split``
    is below the feature count, each node draws that many features with
    ``rng.sample``. Children are created in pairs and the left subtree is
    expanded before the right one, which fixes the order of rng draws.
    """
    d = X.shape[1]
    k = d if features_per_split is None else min(max(1, features_per_split), d)
    if k < d and rng is None:
        raise ValueError("feature subsampling needs an rng")
    root_idx = np.asarray(sample, dtype=np.int64)

    def make(idx: np.ndarray, depth: int) -> Node:
        counts = np.bincount(y[idx], minlength=n_classes)
        leaf = Leaf(tuple(int(c) for c in counts))
        n = len(idx)
        if np.count_nonzero(counts) <= 1 or n < 2 * min_leaf_size:
            return leaf
        if max_depth is not None and depth >= max_depth:
            return leaf
        feats = range(d) if k == d else sorted(rng.sample(range(d), k))
        parent = Fraction(int((counts * counts).sum()), n)
        best: tuple[Fraction, int, float] | None = None
        yi = y[idx]
        for f in feats:
            found = best_split_on_feature(X[idx, f], yi, n_classes, min_leaf_size)
            if found is None:
                continue
            q, thr = found
            if best is None or q > best[0]:
                best = (q, f, thr)
        if best is None or best[0] <= parent:
            return leaf
        _, f, thr = best
        go_left = X[idx, f] <= thr
        return Split(f, thr, (idx[go_left], depth + 1), (idx[~go_left], depth + 1))  # type: ignore[arg-type]

    # explicit stack: unlimited depth must not hit the recursion limit
    root = make(root_idx, 0)
    stack = [root] if isinstance(root, Split) else []
    while stack:
        node = stack.pop()
        left = make(*node.left)  # type: ignore[misc]
        right = make(*node.right)  # type: ignore[misc]
        node.left, node.right = left, right
        for child in (right, left):
            if isinstance(child, Split):
                stack.append(child)
    return root


def preorder(node: Node):
    stack = [node]
    while stack:
        cur = stack.pop()
        yield cur
        if isinstance(cur, Split):
            stack.append(cur.right)
            stack.append(cur.left)


def node_count(node: Node) -> int:
    return sum(1 for _ in preorder(node))
