import numpy as np
import pytest

from voxdrum.learn import (
    LabeledDataset,
    LearnError,
    Normalizer,
    fit_normalizer,
    knn_classify,
    loo_accuracy,
    normalize,
    sfs_select,
)

import oracles


def dataset_1d(values, labels, class_names=None, width=1):
    vectors = np.zeros((len(values), width))
    vectors[:, 0] = values
    names = class_names or sorted(set(labels))
    return LabeledDataset(vectors, list(labels), list(names))


def random_dataset(rng, n=30, width=20, classes=("a", "b")):
    centers = {c: rng.uniform(-3, 3, width) for c in classes}
    rows, labels = [], []
    for _ in range(n):
        c = classes[int(rng.integers(len(classes)))]
        rows.append(centers[c] + rng.standard_normal(width))
        labels.append(c)
    return LabeledDataset(np.array(rows), labels, list(classes))


class TestNormalizer:
    def test_single_vector_zero_std(self):
        ds = dataset_1d([3.0], ["a"])
        norm = fit_normalizer(ds)
        assert norm.mean[0] == 3.0
        assert norm.std[0] == 0.0

    def test_two_values(self):
        ds = dataset_1d([0.0, 2.0], ["a", "b"])
        norm = fit_normalizer(ds)
        assert norm.mean[0] == 1.0
        assert norm.std[0] == 1.0

    def test_matches_two_pass_oracle(self):
        rng = np.random.default_rng(17)
        rows = rng.uniform(-5, 5, (100, 20))
        ds = LabeledDataset(rows, ["a"] * 100, ["a"])
        norm = fit_normalizer(ds)
        mean_ref, std_ref = oracles.normalizer(rows.tolist())
        np.testing.assert_allclose(norm.mean, mean_ref, rtol=1e-9)
        np.testing.assert_allclose(norm.std, std_ref, rtol=1e-9)

    def test_normalize_mean_vector_is_zero(self):
        rng = np.random.default_rng(1)
        rows = rng.uniform(0, 1, (10, 4))
        ds = LabeledDataset(rows, ["a"] * 10, ["a"])
        norm = fit_normalizer(ds)
        assert np.allclose(normalize(norm.mean, norm), 0.0)

    def test_constant_feature_maps_to_zero(self):
        rows = np.column_stack([np.full(5, 7.0), np.arange(5.0)])
        ds = LabeledDataset(rows, ["a"] * 5, ["a"])
        norm = fit_normalizer(ds)
        z = normalize(np.array([123.0, 2.0]), norm)
        assert z[0] == 0.0

    def test_round_trip_recovers_values(self):
        rng = np.random.default_rng(2)
        rows = rng.uniform(-1, 1, (20, 6))
        ds = LabeledDataset(rows, ["a"] * 20, ["a"])
        norm = fit_normalizer(ds)
        x = rng.uniform(-1, 1, 6)
        z = normalize(x, norm)
        back = z * norm.std + norm.mean
        np.testing.assert_allclose(back, x, atol=1e-9)


class TestKnn:
    def test_nearest_of_two(self):
        ds = dataset_1d([0.0, 10.0], ["a", "b"])
        norm = Normalizer(np.zeros(1), np.ones(1))
        assert knn_classify(ds, norm, [0], 1, np.array([1.0])).label == "a"

    def test_exact_match_distance_zero(self):
        rng = np.random.default_rng(10)
        rows = rng.uniform(-1, 1, (8, 3))
        ds = LabeledDataset(rows, list("aabbccab"), ["a", "b", "c"])
        norm = fit_normalizer(ds)
        result = knn_classify(ds, norm, [0, 1, 2], 1, rows[5])
        assert result.label == "c"
        assert result.distances[0] == 0.0

    def test_agrees_with_exhaustive_oracle(self):
        rng = np.random.default_rng(42)
        ds = random_dataset(rng, n=30)
        norm = fit_normalizer(ds)
        mask = [0, 3, 7, 12]
        for _ in range(50):
            q = rng.uniform(-4, 4, 20)
            got = knn_classify(ds, norm, mask, 3, q).label
            ref = oracles.knn_label(ds.vectors.tolist(), ds.labels, ds.class_names,
                                    norm.mean.tolist(), norm.std.tolist(), mask, 3, q.tolist())
            assert got == ref

    def test_vote_tie_broken_by_summed_distance(self):
        # k=2: one neighbour of each class; nearer class wins.
        rows = np.array([[0.0], [3.0]])
        ds = LabeledDataset(rows, ["a", "b"], ["a", "b"])
        norm = Normalizer(np.zeros(1), np.ones(1))
        assert knn_classify(ds, norm, [0], 2, np.array([1.0])).label == "a"
        assert knn_classify(ds, norm, [0], 2, np.array([2.5])).label == "b"

    def test_full_tie_falls_back_to_class_order(self):
        rows = np.array([[-1.0], [1.0]])
        ds = LabeledDataset(rows, ["z", "a"], ["z", "a"])
        norm = Normalizer(np.zeros(1), np.ones(1))
        # Equidistant, one vote each: class_names order picks "z".
        assert knn_classify(ds, norm, [0], 2, np.array([0.0])).label == "z"

    def test_distance_tie_prefers_lower_index(self):
        rows = np.array([[1.0], [1.0]])
        ds = LabeledDataset(rows, ["b", "a"], ["a", "b"])
        norm = Normalizer(np.zeros(1), np.ones(1))
        # Identical points: k=1 must take index 0, labeled "b".
        assert knn_classify(ds, norm, [0], 1, np.array([1.0])).label == "b"

    def test_parameter_validation(self):
        ds = dataset_1d([0.0, 1.0], ["a", "b"])
        norm = Normalizer(np.zeros(1), np.ones(1))
        with pytest.raises(LearnError):
            knn_classify(ds, norm, [], 1, np.array([0.0]))
        with pytest.raises(LearnError):
            knn_classify(ds, norm, [0], 3, np.array([0.0]))
        with pytest.raises(LearnError):
            knn_classify(ds, norm, [5], 1, np.array([0.0]))

    def test_feature_scale_invariance(self):
        rng = np.random.default_rng(5)
        ds = random_dataset(rng, n=24)
        queries = rng.uniform(-4, 4, (30, 20))
        for c in (2.0, 0.5, 8.0):
            scaled_rows = ds.vectors.copy()
            scaled_rows[:, 4] *= c
            ds_scaled = LabeledDataset(scaled_rows, ds.labels, ds.class_names)
            scaled_queries = queries.copy()
            scaled_queries[:, 4] *= c
            for q, qs in zip(queries, scaled_queries):
                a = knn_classify(ds, fit_normalizer(ds), [0, 4, 9], 3, q).label
                b = knn_classify(ds_scaled, fit_normalizer(ds_scaled), [0, 4, 9], 3, qs).label
                assert a == b


class TestLooAccuracy:
    def test_perfect_separation(self):
        ds = dataset_1d([0.0] * 5 + [100.0] * 5, ["a"] * 5 + ["b"] * 5)
        assert loo_accuracy(ds, [0], 1) == 1.0

    def test_two_items_different_labels(self):
        ds = dataset_1d([0.0, 1.0], ["a", "b"])
        assert loo_accuracy(ds, [0], 1) == 0.0

    def test_identical_vectors_majority_fraction(self):
        # All-zero vectors: every distance ties, lowest index wins.
        # For labels [a,a,b,b]: items 1,2,3 fall to index 0 ("a"), item 0
        # falls to index 1 ("a"): accuracy = 2/4 (majority fraction).
        ds = dataset_1d([1.0, 1.0, 1.0, 1.0], ["a", "a", "b", "b"])
        assert loo_accuracy(ds, [0], 1) == 0.5
        # For [a,a,a,b]: 3/4.
        ds = dataset_1d([1.0] * 4, ["a", "a", "a", "b"])
        assert loo_accuracy(ds, [0], 1) == 0.75

    def test_matches_oracle_on_random_datasets(self):
        rng = np.random.default_rng(77)
        for _ in range(5):
            ds = random_dataset(rng, n=16, width=6)
            got = loo_accuracy(ds, [0, 2, 5], 3)
            ref = oracles.loo_accuracy(ds.vectors.tolist(), ds.labels, ds.class_names,
                                       [0, 2, 5], 3)
            assert got == ref

    def test_k_bound(self):
        ds = dataset_1d([0.0, 1.0], ["a", "b"])
        with pytest.raises(LearnError):
            loo_accuracy(ds, [0], 2)


class TestSfs:
    def planted_dataset(self, planted=7, n_per_class=10, seed=0):
        rng = np.random.default_rng(seed)
        n = 2 * n_per_class
        rows = rng.standard_normal((n, 20))
        labels = ["a"] * n_per_class + ["b"] * n_per_class
        rows[:n_per_class, planted] = rng.uniform(0.0, 0.4, n_per_class)
        rows[n_per_class:, planted] = rng.uniform(5.0, 5.4, n_per_class)
        return LabeledDataset(rows, labels, ["a", "b"])

    def test_planted_feature_found_alone(self):
        ds = self.planted_dataset()
        result = sfs_select(ds, k=1)
        assert result.selected == [7]
        assert result.accuracy_trace == [1.0]
        assert result.final_accuracy == 1.0

    def test_duplicate_features_tie_to_lowest_index(self):
        rng = np.random.default_rng(3)
        rows = rng.standard_normal((12, 20)) * 0.01
        labels = ["a"] * 6 + ["b"] * 6
        separating = np.concatenate([np.zeros(6), np.ones(6) * 9])
        rows[:, 2] = separating
        rows[:, 5] = separating
        ds = LabeledDataset(rows, labels, ["a", "b"])
        result = sfs_select(ds, k=1)
        assert result.selected[0] == 2

    def test_all_constant_features(self):
        rows = np.ones((6, 20))
        ds = LabeledDataset(rows, ["a"] * 4 + ["b"] * 2, ["a", "b"])
        result = sfs_select(ds, k=1)
        assert result.selected == [0]
        # Identical vectors: LOO falls back to lowest-index neighbours,
        # which are "a" for every item except item 0 (also "a").
        assert result.accuracy_trace == [4 / 6]

    def test_trace_strictly_increasing_on_random_data(self):
        rng = np.random.default_rng(123)
        for trial in range(8):
            ds = random_dataset(rng, n=20, width=8,
                                classes=("a", "b", "c") if trial % 2 else ("a", "b"))
            result = sfs_select(ds, k=1)
            trace = result.accuracy_trace
            assert len(result.selected) == len(trace) >= 1
            assert all(b > a for a, b in zip(trace, trace[1:]))
            assert len(result.selected) <= ds.n_features

    def test_deterministic(self):
        rng = np.random.default_rng(55)
        ds = random_dataset(rng, n=18, width=10)
        r1 = sfs_select(ds, k=1)
        r2 = sfs_select(ds, k=1)
        assert r1.selected == r2.selected
        assert r1.accuracy_trace == r2.accuracy_trace

    def test_label_permutation_equivariance(self):
        rng = np.random.default_rng(9)
        ds = random_dataset(rng, n=20, width=6, classes=("a", "b", "c"))
        renamed = LabeledDataset(ds.vectors, ["x" + l for l in ds.labels],
                                 ["x" + c for c in ds.class_names])
        r1 = sfs_select(ds, k=1)
        r2 = sfs_select(renamed, k=1)
        assert r1.selected == r2.selected
        assert r1.accuracy_trace == r2.accuracy_trace

    def test_single_class_rejected(self):
        ds = dataset_1d([0.0, 1.0], ["a", "a"])
        with pytest.raises(LearnError):
            sfs_select(ds, k=1)


class TestDatasetValidation:
    def test_label_outside_class_names(self):
        with pytest.raises(LearnError):
            LabeledDataset(np.zeros((2, 3)), ["a", "q"], ["a", "b"])

    def test_length_mismatch(self):
        with pytest.raises(LearnError):
            LabeledDataset(np.zeros((2, 3)), ["a"], ["a"])
