import numpy as np
import pytest
from __utils__ import random_points
from parkrr.exceptions import DimensionMismatchException, InvalidParameterException
from parkrr.kernel import KernelSpec, as_points, diagonal, evaluate, gram, kappa_sq, \
                          rkhs_dist_sq, rkhs_dist_sq_matrix

# it evaluates the kernel families on hand-computed examples
input_data = [
    (KernelSpec("gaussian", 1.0), [0.0, 0.0], [1.0, 0.0], np.exp(-0.5)),
    (KernelSpec("gaussian", 2.0), [0.0, 0.0], [0.0, 2.0], np.exp(-0.5)),
    (KernelSpec("laplacian", 1.0), [0.0, 0.0], [1.0, -1.0], np.exp(-2.0)),
    (KernelSpec("laplacian", 4.0), [1.0, 1.0], [1.0, 3.0], np.exp(-0.5)),
    (KernelSpec("linear"), [1.0, 2.0], [3.0, -1.0], 1.0),
]

@pytest.mark.parametrize("spec,x,xp,expected", input_data)
def test_evaluate(spec, x, xp, expected):
    assert evaluate(spec, x, xp) == pytest.approx(expected, rel=1e-14)

# it computes symmetric positive semidefinite Gram matrices
input_data = ["gaussian", "laplacian", "linear"]

@pytest.mark.parametrize("family", input_data)
def test_gram_psd(family):
    spec = KernelSpec(family, 1.5)
    X = random_points(40, 3, seed=1)
    K = gram(spec, X, X)

    assert np.array_equal(K, K.T)
    assert np.linalg.eigvalsh(K).min() > -1e-10 * np.trace(K)

# it returns a rectangular matrix for two different point sets
def test_gram_shape():
    spec = KernelSpec("gaussian", 1.0)
    K = gram(spec, random_points(5, 2, seed=0), random_points(3, 2, seed=1))

    assert K.shape == (5, 3)
    assert np.all((K > 0) & (K <= 1))

# it has a unit diagonal for the distance based kernels only
def test_diagonal_and_kappa():
    X = np.array([[1.0, 2.0], [3.0, 0.0]])

    assert np.array_equal(diagonal(KernelSpec("gaussian"), X), np.ones(2))
    assert np.array_equal(diagonal(KernelSpec("linear"), X), np.array([5.0, 9.0]))
    assert kappa_sq(KernelSpec("laplacian")) == 1.0
    assert kappa_sq(KernelSpec("linear"), X) == 9.0

    with pytest.raises(InvalidParameterException):
        kappa_sq(KernelSpec("linear"))

# it computes RKHS distances that vanish on the diagonal and match the kernel trick
def test_rkhs_distances():
    spec = KernelSpec("gaussian", 1.0)
    X = random_points(6, 2, seed=3)
    D = rkhs_dist_sq_matrix(spec, X, X)

    assert np.all(D >= 0)
    assert np.all(np.diag(D) == 0)
    assert rkhs_dist_sq(spec, X[0], X[1]) == pytest.approx(2.0 - 2.0 * evaluate(spec, X[0], X[1]))

    # for the linear kernel the RKHS distance is the squared euclidean distance
    linear = KernelSpec("linear")
    assert rkhs_dist_sq(linear, [1.0, 2.0], [4.0, 6.0]) == pytest.approx(25.0)

# it rejects invalid kernel parameters
input_data = [
    ("polynomial", 1.0),
    ("gaussian", 0.0),
    ("laplacian", -1.0),
]

@pytest.mark.parametrize("family,bandwidth", input_data)
def test_invalid_spec(family, bandwidth):
    with pytest.raises(InvalidParameterException):
        KernelSpec(family, bandwidth)

# it ignores the bandwidth of the linear kernel
def test_linear_bandwidth_ignored():
    assert KernelSpec("linear", 0.0).family == "linear"

# it fails for points of different dimensions
def test_dimension_mismatch():
    spec = KernelSpec("gaussian", 1.0)

    with pytest.raises(DimensionMismatchException):
        gram(spec, np.zeros((2, 3)), np.zeros((2, 2)))

    with pytest.raises(DimensionMismatchException):
        evaluate(spec, [0.0, 1.0], [0.0])

# it converts vectors to single rows
def test_as_points():
    assert as_points([1.0, 2.0]).shape == (1, 2)

    with pytest.raises(DimensionMismatchException):
        as_points(np.zeros((2, 2, 2)))

# it restores a kernel from its dictionary form
def test_spec_dict():
    spec = KernelSpec("laplacian", 0.7)
    assert KernelSpec.from_dict(spec.to_dict()) == spec
