"""Per-digit-class outlier detection with isolation forests.

Each tree is grown on a seeded subsample, splitting on a uniformly random
feature at a uniform value between that feature's subsample min and max,
down to isolation or the ceil(log2(subsample)) depth ceiling. Scores follow
s(x, n) = 2^(-E[h(x)] / c(n)) with exact harmonic numbers in c.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from .mnist_io import LabeledSet


@dataclass(frozen=True)
class IsolationForestParams:
    tree_count: int = 100
    subsample_size: int = 256
    seed: int = 0
    outlier_fraction: float = 0.10

    def __post_init__(self):
        if self.tree_count < 1:
            raise ValueError("tree_count must be >= 1")
        if self.subsample_size < 2:
            raise ValueError("subsample_size must be >= 2")
        if not 0.0 < self.outlier_fraction < 1.0:
            raise ValueError("outlier_fraction must lie in (0, 1)")


def harmonic(k: int) -> float:
    return float(np.sum(1.0 / np.arange(1, k + 1))) if k > 0 else 0.0


@lru_cache(maxsize=None)
def average_path_length(n: int) -> float:
    """Expected unsuccessful-search path length c(n) of a BST over n points."""
    if n <= 1:
        return 0.0
    return 2.0 * harmonic(n - 1) - 2.0 * (n - 1) / n


class _Node:
    __slots__ = ("feature", "threshold", "left", "right", "size")

    def __init__(self, feature=None, threshold=None, left=None, right=None, size=0):
        self.feature = feature
        self.threshold = threshold
        self.left = left
        self.right = right
        self.size = size

    @property
    def is_leaf(self) -> bool:
        return self.feature is None


def _grow(data: np.ndarray, idx: np.ndarray, depth: int, limit: int, rng) -> _Node:
    if depth >= limit or len(idx) <= 1:
        return _Node(size=len(idx))
    sub = data[idx]
    lo = sub.min(axis=0)
    hi = sub.max(axis=0)
    splittable = np.flatnonzero(hi > lo)
    if len(splittable) == 0:  # all duplicates
        return _Node(size=len(idx))
    feature = int(rng.choice(splittable))
    threshold = float(rng.uniform(lo[feature], hi[feature]))
    mask = sub[:, feature] < threshold
    left = _grow(data, idx[mask], depth + 1, limit, rng)
    right = _grow(data, idx[~mask], depth + 1, limit, rng)
    return _Node(feature=feature, threshold=threshold, left=left, right=right,
                 size=len(idx))


class IsolationForest:
    """Ensemble of isolation trees over row vectors."""

    def __init__(self, trees: list[_Node], subsample_size: int):
        self.trees = trees
        self.subsample_size = subsample_size
        self._normalizer = average_path_length(subsample_size)

    def path_lengths(self, points: np.ndarray) -> np.ndarray:
        """Mean path length per point, averaged over all trees."""
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        totals = np.zeros(len(points))
        for tree in self.trees:
            self._descend(tree, points, np.arange(len(points)), 0, totals)
        return totals / len(self.trees)

    def _descend(self, node: _Node, points, idx, depth, totals):
        if node.is_leaf:
            totals[idx] += depth + average_path_length(node.size)
            return
        go_left = points[idx, node.feature] < node.threshold
        if go_left.any():
            self._descend(node.left, points, idx[go_left], depth + 1, totals)
        if (~go_left).any():
            self._descend(node.right, points, idx[~go_left], depth + 1, totals)

    def scores(self, points: np.ndarray) -> np.ndarray:
        return 2.0 ** (-self.path_lengths(points) / self._normalizer)


def build_forest(points: np.ndarray, params: IsolationForestParams) -> IsolationForest:
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if len(points) < 2:
        raise ValueError(f"need at least 2 points, got {len(points)}")
    rng = np.random.default_rng(params.seed)
    subsample = min(params.subsample_size, len(points))
    limit = math.ceil(math.log2(subsample))
    trees = []
    for _ in range(params.tree_count):
        idx = rng.choice(len(points), size=subsample, replace=False)
        trees.append(_grow(points[idx], np.arange(subsample), 0, limit, rng))
    return IsolationForest(trees, subsample)


def anomaly_score(forest: IsolationForest, point: np.ndarray) -> float:
    return float(forest.scores(point)[0])


@dataclass(frozen=True)
class OutlierPartition:
    """Disjoint cover of each digit class into outlier and typical indices."""

    outliers: dict[int, np.ndarray] = field(default_factory=dict)
    typicals: dict[int, np.ndarray] = field(default_factory=dict)

    def classes(self):
        return sorted(self.outliers)


def partition_by_label(dataset: LabeledSet, params: IsolationForestParams) -> OutlierPartition:
    """Flag the top outlier_fraction of each class by anomaly score.

    Ties resolve to the lower dataset index. A fresh forest is grown per
    class, seeded from params.seed and the class label.
    """
    outliers: dict[int, np.ndarray] = {}
    typicals: dict[int, np.ndarray] = {}
    for cls in np.unique(dataset.labels):
        cls = int(cls)
        idx = np.flatnonzero(dataset.labels == cls)
        if len(idx) < 2:
            raise ValueError(f"class {cls} has {len(idx)} members, need >= 2")
        points = dataset.images[idx].reshape(len(idx), -1).astype(np.float64)
        cls_params = IsolationForestParams(
            tree_count=params.tree_count,
            subsample_size=min(params.subsample_size, len(idx)),
            seed=int(np.random.SeedSequence([params.seed, cls]).generate_state(1)[0]),
            outlier_fraction=params.outlier_fraction,
        )
        forest = build_forest(points, cls_params)
        scores = forest.scores(points)
        k = int(math.floor(params.outlier_fraction * len(idx) + 0.5))
        # stable sort on -score keeps lower index first among ties
        order = np.argsort(-scores, kind="stable")
        flagged = np.sort(idx[order[:k]])
        outliers[cls] = flagged
        typicals[cls] = np.setdiff1d(idx, flagged)
    return OutlierPartition(outliers=outliers, typicals=typicals)


def save_partition(partition: OutlierPartition, params: IsolationForestParams, path) -> None:
    doc = {
        "classes": {
            str(cls): {
                "outliers": partition.outliers[cls].tolist(),
                "typicals": partition.typicals[cls].tolist(),
            }
            for cls in partition.classes()
        },
        "params": {
            "tree_count": params.tree_count,
            "subsample_size": params.subsample_size,
            "outlier_fraction": params.outlier_fraction,
        },
        "seed": params.seed,
    }
    Path(path).write_text(json.dumps(doc))


def load_partition(path) -> tuple[OutlierPartition, IsolationForestParams]:
    doc = json.loads(Path(path).read_text())
    outliers = {int(c): np.asarray(v["outliers"], dtype=np.int64)
                for c, v in doc["classes"].items()}
    typicals = {int(c): np.asarray(v["typicals"], dtype=np.int64)
                for c, v in doc["classes"].items()}
    params = IsolationForestParams(seed=doc["seed"], **doc["params"])
    return OutlierPartition(outliers=outliers, typicals=typicals), params
