import numpy as np
import pytest

from artcp import Dataset, kmeans_label_scores, kmeans_scores

from oracles import best_two_partition, labels_to_partition


def test_two_well_separated_clusters():
    data = Dataset.vector([0.0, 0.1, 10.0, 10.1])
    result = kmeans_scores(data, k=2)
    expected = best_two_partition(data.matrix)  # brute force over all 2-partitions
    assert labels_to_partition(result.labels) == expected
    assert result.converged


def test_k_one_gives_sample_mean():
    data = Dataset.vector([1.0, 2.0, 6.0])
    result = kmeans_scores(data, k=1)
    assert np.array_equal(result.labels, [1, 1, 1])
    assert result.centroids[0, 0] == pytest.approx(3.0)


def test_labels_lie_in_one_to_k():
    rng = np.random.default_rng(0)
    data = Dataset.vector(rng.normal(size=(30, 2)))
    result = kmeans_scores(data, k=4)
    assert set(np.unique(result.labels)) <= set(range(1, 5))
    assert result.K == 4


def test_more_clusters_than_points_rejected():
    with pytest.raises(ValueError, match="clusters"):
        kmeans_scores(Dataset.vector([1.0, 2.0, 3.0]), k=5)


def test_shuffle_equivariance_bit_exact():
    rng = np.random.default_rng(1)
    mat = np.concatenate([rng.normal(size=(15, 2)), rng.normal(size=(15, 2)) + 4.0])
    data = Dataset.vector(mat)
    base = kmeans_scores(data, k=3)
    for _ in range(10):
        perm = rng.permutation(30)
        shuffled = kmeans_scores(Dataset.vector(mat[perm]), k=3)
        routed = np.empty(30, dtype=np.int64)
        routed[perm] = shuffled.labels
        assert np.array_equal(routed, base.labels)
        assert shuffled.centroids.tobytes() == base.centroids.tobytes()


def test_auto_k_picks_two_for_two_separated_blobs():
    rng = np.random.default_rng(2)
    mat = np.concatenate([rng.normal(size=(30, 6)), rng.normal(size=(30, 6)) + 8.0])
    result = kmeans_scores(Dataset.vector(mat), k="auto", k_max=5)
    assert result.K == 2
    assert result.bic is not None


def test_auto_k_equals_bic_argmin_over_fixed_k_runs():
    from artcp.kmeans import _bic

    rng = np.random.default_rng(6)
    mat = rng.normal(size=(40, 2))
    data = Dataset.vector(mat)
    bics = [_bic(kmeans_scores(data, k=kk).within_loss, 40, 2, kk) for kk in range(1, 7)]
    chosen = kmeans_scores(data, k="auto", k_max=6)
    assert chosen.K == int(np.argmin(bics)) + 1
    assert chosen.bic == pytest.approx(min(bics))


def test_regression_loss_separates_coefficient_regimes():
    rng = np.random.default_rng(3)
    x = rng.normal(size=(40, 1)) + 3.0
    y = np.concatenate([5.0 * x[:20, 0], -5.0 * x[20:, 0]]) + 0.01 * rng.normal(size=40)
    result = kmeans_scores(Dataset.regression(y, x), k=2)
    first, second = result.labels[:20], result.labels[20:]
    assert np.unique(first).size == 1
    assert np.unique(second).size == 1
    assert first[0] != second[0]


def test_regression_shuffle_equivariance():
    rng = np.random.default_rng(4)
    x = rng.normal(size=(24, 2))
    y = rng.normal(size=24)
    data = Dataset.regression(y, x)
    base = kmeans_scores(data, k=2)
    for _ in range(8):
        perm = rng.permutation(24)
        shuffled = kmeans_scores(Dataset.regression(y[perm], x[perm]), k=2)
        routed = np.empty(24, dtype=np.int64)
        routed[perm] = shuffled.labels
        assert np.array_equal(routed, base.labels)


def test_label_scores_are_float_labels():
    data = Dataset.vector([0.0, 0.1, 9.0, 9.1])
    scores = kmeans_label_scores(data, k=2)
    assert scores.scores.dtype == np.float64
    assert scores.has_ties()
