import numpy as np
import pytest
from __utils__ import random_points, two_blobs
from mock import patch
from parkrr.exceptions import ArtifactFormatException, DegenerateRankException, \
                              InconsistentInputsException, InvalidParameterException
from parkrr.kernel import KernelSpec, gram, rkhs_dist_sq
from parkrr.partition import Partition, assign, build_partition, greedy_centroids, \
                             greedy_selection_trace, points_fingerprint, uniform_centroids

def brute_force_greedy(X, spec, Q):
    """Argmax of the Schur complement K(c, c) - k_S(c)^T K_SS^-1 k_S(c), recomputed from scratch"""

    K = gram(spec, X, X)
    selected = []

    for _ in range(Q):
        if selected:
            K_SS = K[np.ix_(selected, selected)]
            K_Sc = K[selected, :]
            schur = np.diag(K) - np.einsum("ij,ij->j", K_Sc, np.linalg.solve(K_SS, K_Sc))
        else:
            schur = np.diag(K).copy()

        schur[selected] = -np.inf
        selected.append(int(np.argmax(schur)))

    return selected

# it selects the same centroids as a brute-force Schur complement search
input_data = list(range(10))

@pytest.mark.parametrize("seed", input_data)
def test_greedy_oracle(seed):
    spec = KernelSpec("gaussian", 2.0)
    X = random_points(200, 4, seed=seed)

    assert greedy_centroids(X, spec, 8).tolist() == brute_force_greedy(X, spec, 8)

# it starts with index 0 when every point has the same kernel diagonal
def test_greedy_first_tie():
    X = random_points(20, 3, seed=1)

    assert greedy_centroids(X, KernelSpec("gaussian", 1.0), 1).tolist() == [0]
    assert greedy_centroids(X, KernelSpec("laplacian", 1.0), 1).tolist() == [0]

# it never increases the residual of a point (interlacing of Schur complements)
def test_greedy_residuals_nonincreasing():
    X = random_points(100, 2, seed=2)
    indices, history = greedy_selection_trace(X, KernelSpec("gaussian", 1.0), 10)

    assert len(set(indices.tolist())) == 10
    assert np.all(np.diff(history, axis=0) <= 1e-12)
    assert np.all(history >= 0)

    # the selected residual is the largest available one
    for q, j in enumerate(indices):
        available = np.setdiff1d(np.arange(100), indices[:q])
        assert history[q, j] == history[q, available].max()

# it stops when the remaining Schur complements vanish
def test_greedy_degenerate():
    X = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 1.0], [1.0, 1.0]])

    with pytest.raises(DegenerateRankException) as error:
        greedy_centroids(X, KernelSpec("gaussian", 1.0), 3)

    assert error.value.selectable == 2

    # a linear kernel on collinear points has rank one
    line = np.outer(np.arange(1.0, 6.0), [1.0, 2.0])
    with pytest.raises(DegenerateRankException):
        greedy_centroids(line, KernelSpec("linear"), 2)

# it rejects more centroids than points
input_data = [0, 6]

@pytest.mark.parametrize("Q", input_data)
def test_invalid_q(Q):
    X = random_points(5, 2)

    with pytest.raises(InvalidParameterException):
        greedy_centroids(X, KernelSpec(), Q)

    with pytest.raises(InvalidParameterException):
        uniform_centroids(X, Q, 0)

# it samples distinct centroids reproducibly
def test_uniform_centroids():
    X = random_points(50, 2)
    first = uniform_centroids(X, 7, 3)

    assert np.array_equal(first, uniform_centroids(X, 7, 3))
    assert len(set(first.tolist())) == 7
    assert sorted(uniform_centroids(X, 50, 1).tolist()) == list(range(50))

# it includes every index with frequency Q / n
def test_uniform_inclusion_frequency():
    X = random_points(10, 1)
    counts = np.zeros(10)

    for seed in range(1000):
        counts[uniform_centroids(X, 3, seed)] += 1

    assert np.all(np.abs(counts / 1000.0 - 0.3) <= 0.05)

# it assigns every point to its nearest centroid
def test_assign_oracle():
    spec = KernelSpec("gaussian", 1.5)
    X = random_points(300, 3, seed=4)
    centroids = uniform_centroids(X, 5, 9)

    expected = []
    for x in X:
        distances = [rkhs_dist_sq(spec, x, X[c]) for c in centroids]
        expected.append(int(np.argmin(distances)))

    assignment = assign(X, centroids, spec)

    assert assignment.tolist() == expected
    assert assignment[centroids].tolist() == list(range(5))

# it puts every point into the single cell
def test_assign_single_cell():
    X = random_points(30, 2)

    assert np.all(assign(X, [4], KernelSpec()) == 0)

    with pytest.raises(InvalidParameterException):
        assign(X, [], KernelSpec())

# it separates two distant blobs
def test_two_blobs():
    X, labels = two_blobs(50)
    partition = build_partition(X, KernelSpec("gaussian", 1.0), 2)

    for cell in partition.cells:
        assert len(set(labels[cell].tolist())) == 1

    assert sorted(partition.cell_sizes.tolist()) == [50, 50]

# it builds disjoint cells covering every point
input_data = ["greedy", "uniform"]

@pytest.mark.parametrize("mode", input_data)
def test_build_partition(mode):
    X = random_points(500, 3, seed=5)
    partition = build_partition(X, KernelSpec("gaussian", 1.0), 32, mode, seed=2)

    indices = np.concatenate(partition.cells)

    assert partition.cell_sizes.sum() == 500
    assert sorted(indices.tolist()) == list(range(500))
    assert partition.cell_fractions.sum() == pytest.approx(1.0)
    assert partition.mode == mode
    assert partition.stats["cells"] == partition.num_cells

    for q, cell in enumerate(partition.cells):
        assert np.all(np.diff(cell) > 0)
        assert np.all(partition.assignment[cell] == q)

    # the bookkeeping equals a fresh assignment
    assert np.array_equal(assign(X, partition.centroid_indices, KernelSpec("gaussian", 1.0)),
                          partition.assignment)

# it puts all points into one cell for Q = 1
def test_build_partition_single():
    X = random_points(40, 2)
    partition = build_partition(X, KernelSpec(), 1)

    assert partition.num_cells == 1
    assert partition.cell_fractions.tolist() == [1.0]

# it drops cells left empty by duplicate centroids
@patch("parkrr.partition.uniform_centroids")
def test_drop_empty_cells(mock_uniform):
    X = np.array([[0.0, 0.0], [0.0, 0.0], [5.0, 5.0], [5.1, 5.0]])
    mock_uniform.return_value = np.array([0, 1, 2])

    partition = build_partition(X, KernelSpec("gaussian", 1.0), 3, "uniform")

    assert partition.num_cells == 2
    assert partition.stats["empty_dropped"] == 1
    assert partition.centroid_indices.tolist() == [0, 2]
    assert partition.assignment.tolist() == [0, 0, 1, 1]

# it rejects unknown modes and inconsistent assignments
def test_invalid_partition():
    with pytest.raises(InvalidParameterException):
        build_partition(random_points(5, 2), KernelSpec(), 2, "kmeans")

    with pytest.raises(InconsistentInputsException):
        Partition([0, 1], [0, 2, 1])

# it stores a partition as JSON
def test_partition_json(tmpdir):
    X = random_points(60, 2, seed=8)
    partition = build_partition(X, KernelSpec(), 4)
    path = str(tmpdir.join("partition.json"))

    partition.to_json(path)
    restored = Partition.from_json(path)

    assert np.array_equal(restored.centroid_indices, partition.centroid_indices)
    assert np.array_equal(restored.assignment, partition.assignment)
    assert restored.stats["cells"] == partition.stats["cells"]

# it refuses a partition file written for other points
def test_partition_json_fingerprint(tmpdir):
    X = random_points(60, 2, seed=8)
    partition = build_partition(X, KernelSpec(), 4)
    path = str(tmpdir.join("partition.json"))

    partition.to_json(path, points_fingerprint(X))
    restored = Partition.from_json(path, points_fingerprint(X))

    assert np.array_equal(restored.assignment, partition.assignment)
    assert points_fingerprint(X) != points_fingerprint(X[::-1])

    with pytest.raises(InconsistentInputsException):
        Partition.from_json(path, points_fingerprint(X[::-1]))

# it rejects unreadable partition files
input_data = ["{", "[]", "{\"assignment\": [0]}"]

@pytest.mark.parametrize("content", input_data)
def test_partition_json_invalid(content, tmpdir):
    path = tmpdir.join("partition.json")
    path.write(content)

    with pytest.raises(ArtifactFormatException):
        Partition.from_json(str(path))
