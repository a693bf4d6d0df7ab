import numpy as np
import pytest

from chorus.mnist_io import LabeledSet
from chorus.outliers import (
    IsolationForest,
    IsolationForestParams,
    anomaly_score,
    average_path_length,
    build_forest,
    harmonic,
    load_partition,
    partition_by_label,
    save_partition,
)


def planted_cluster(seed, n=100):
    """Tight cluster embedded in 784-d plus one far point."""
    rng = np.random.default_rng(seed)
    points = np.zeros((n + 1, 784))
    points[:n, 0] = rng.normal(0.0, 1.0, n)
    points[:n, 1] = rng.normal(0.0, 1.0, n)
    points[n, 0] = 60.0
    points[n, 1] = -55.0
    return points


class TestNormalizer:
    def test_closed_form_c2(self):
        # c(2) = 2 H(1) - 2 * 1/2 = 1 exactly
        assert average_path_length(2) == 1.0

    def test_degenerate(self):
        assert average_path_length(0) == 0.0
        assert average_path_length(1) == 0.0

    def test_exact_harmonic(self):
        assert harmonic(4) == pytest.approx(1 + 0.5 + 1 / 3 + 0.25)


class TestForest:
    def test_identical_points_equal_paths(self):
        points = np.ones((2, 784))
        params = IsolationForestParams(tree_count=10, subsample_size=2, seed=0)
        forest = build_forest(points, params)
        lengths = forest.path_lengths(points)
        assert lengths[0] == lengths[1]
        # no split possible: every tree is a depth-0 leaf
        assert all(tree.is_leaf for tree in forest.trees)

    def test_scores_in_open_unit_interval(self):
        points = planted_cluster(0)
        params = IsolationForestParams(tree_count=50, subsample_size=64, seed=0)
        scores = build_forest(points, params).scores(points)
        assert (scores > 0).all() and (scores < 1).all()

    def test_score_half_at_normalizer(self):
        # s = 2^(-E[h]/c(n)): mean path equal to c(n) forces 0.5
        forest = IsolationForest.__new__(IsolationForest)
        forest.subsample_size = 64
        forest._normalizer = average_path_length(64)
        assert 2.0 ** (-forest._normalizer / forest._normalizer) == 0.5

    @pytest.mark.parametrize("seed", range(10))
    def test_planted_outlier_has_max_score(self, seed):
        points = planted_cluster(seed)
        params = IsolationForestParams(tree_count=100, subsample_size=64, seed=seed)
        scores = build_forest(points, params).scores(points)
        assert scores.argmax() == len(points) - 1

    def test_deterministic_for_seed(self):
        points = planted_cluster(3)
        params = IsolationForestParams(tree_count=20, subsample_size=32, seed=5)
        s1 = build_forest(points, params).scores(points)
        s2 = build_forest(points, params).scores(points)
        assert np.array_equal(s1, s2)

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            build_forest(np.zeros((1, 784)), IsolationForestParams())

    def test_anomaly_score_single_point(self):
        points = planted_cluster(1)
        forest = build_forest(points, IsolationForestParams(tree_count=20,
                                                            subsample_size=32, seed=1))
        score = anomaly_score(forest, points[-1])
        assert 0 < score < 1


def toy_set(per_class=40, classes=3, seed=0):
    rng = np.random.default_rng(seed)
    images = rng.integers(0, 256, (per_class * classes, 28, 28), dtype=np.uint8)
    labels = np.repeat(np.arange(classes, dtype=np.uint8), per_class)
    return LabeledSet(images=images, labels=labels, split="train")


class TestPartition:
    def test_counts_and_disjoint_cover(self):
        ds = toy_set(per_class=100)
        params = IsolationForestParams(tree_count=20, subsample_size=32, seed=0,
                                       outlier_fraction=0.10)
        part = partition_by_label(ds, params)
        for cls in part.classes():
            out, typ = part.outliers[cls], part.typicals[cls]
            assert len(out) == 10
            assert len(np.intersect1d(out, typ)) == 0
            combined = np.sort(np.concatenate([out, typ]))
            assert np.array_equal(combined, np.flatnonzero(ds.labels == cls))

    def test_tiny_class_rounds_to_zero(self):
        ds = toy_set(per_class=4)
        params = IsolationForestParams(tree_count=10, subsample_size=4, seed=0,
                                       outlier_fraction=0.05)
        part = partition_by_label(ds, params)
        assert all(len(part.outliers[c]) == 0 for c in part.classes())

    def test_determinism(self):
        ds = toy_set()
        params = IsolationForestParams(tree_count=15, subsample_size=32, seed=9)
        p1 = partition_by_label(ds, params)
        p2 = partition_by_label(ds, params)
        for cls in p1.classes():
            assert np.array_equal(p1.outliers[cls], p2.outliers[cls])

    def test_fraction_nesting(self):
        ds = toy_set(per_class=60)
        small = IsolationForestParams(tree_count=15, subsample_size=32, seed=4,
                                      outlier_fraction=0.10)
        large = IsolationForestParams(tree_count=15, subsample_size=32, seed=4,
                                      outlier_fraction=0.20)
        p_small = partition_by_label(ds, small)
        p_large = partition_by_label(ds, large)
        for cls in p_small.classes():
            assert set(p_small.outliers[cls]) <= set(p_large.outliers[cls])

    def test_class_too_small(self):
        images = np.zeros((3, 28, 28), dtype=np.uint8)
        labels = np.array([0, 0, 1], dtype=np.uint8)
        ds = LabeledSet(images=images, labels=labels, split="train")
        with pytest.raises(ValueError, match="class 1"):
            partition_by_label(ds, IsolationForestParams(tree_count=5,
                                                         subsample_size=2))

    def test_json_round_trip(self, tmp_path):
        ds = toy_set()
        params = IsolationForestParams(tree_count=10, subsample_size=16, seed=2)
        part = partition_by_label(ds, params)
        path = tmp_path / "partition.json"
        save_partition(part, params, path)
        loaded, loaded_params = load_partition(path)
        assert loaded_params == params
        for cls in part.classes():
            assert np.array_equal(loaded.outliers[cls], part.outliers[cls])
            assert np.array_equal(loaded.typicals[cls], part.typicals[cls])


class TestParamValidation:
    def test_bad_params(self):
        with pytest.raises(ValueError):
            IsolationForestParams(tree_count=0)
        with pytest.raises(ValueError):
            IsolationForestParams(outlier_fraction=0.0)
        with pytest.raises(ValueError):
            IsolationForestParams(outlier_fraction=1.0)
