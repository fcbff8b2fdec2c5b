#
# Copyright (c) 2022 parkrr developers
#
# This program is free software; you can redistribute it and/or
# modify it under the terms of version 3 of the GNU General Public License as
# published by the Free Software Foundation.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program; if not, see <http://www.gnu.org/licenses/>.

import numpy as np
from parkrr.exceptions import DimensionMismatchException, InvalidParameterException
from parkrr.general import KERNEL_FAMILIES
from scipy.spatial.distance import cdist

class KernelSpec:
    """Kernel family and bandwidth

    gaussian:  exp(-||x - x'||^2 / (2 bandwidth^2))
    laplacian: exp(-||x - x'||_1 / bandwidth)
    linear:    <x, x'>  (bandwidth ignored)
    """

    def __init__(self, family="gaussian", bandwidth=1.0):
        if family not in KERNEL_FAMILIES:
            raise InvalidParameterException("kernel.family", family,
                "must be one of {}".format(", ".join(KERNEL_FAMILIES)))

        bandwidth = float(bandwidth)
        if family != "linear" and not bandwidth > 0:
            raise InvalidParameterException("kernel.bandwidth", bandwidth, "must be positive")

        self._family = family
        self._bandwidth = bandwidth

    @property
    def family(self):
        return self._family

    @property
    def bandwidth(self):
        return self._bandwidth

    @property
    def is_normalized(self):
        """True when K(x, x) = 1 for every x"""
        return self._family != "linear"

    def to_dict(self):
        return {"family": self._family, "bandwidth": self._bandwidth}

    @classmethod
    def from_dict(cls, data):
        return cls(data["family"], data["bandwidth"])

    def __eq__(self, other):
        return isinstance(other, KernelSpec) and self.to_dict() == other.to_dict()

    def __repr__(self):
        return "KernelSpec(family={!r}, bandwidth={!r})".format(self._family, self._bandwidth)

def as_points(X, name="points"):
    """Returns X as a 2-d float64 array (a single vector becomes one row)

    :param array_like X: points
    :param string name: used in error messages
    :return ndarray: n x d array
    """

    X = np.asarray(X, dtype=np.float64)

    if X.ndim == 1:
        X = X[np.newaxis, :]

    if X.ndim != 2 or X.shape[1] < 1:
        raise DimensionMismatchException("n x d with d >= 1", X.shape, name)

    return X

def _check_same_dim(X, Xp):
    if X.shape[1] != Xp.shape[1]:
        raise DimensionMismatchException(X.shape[1], Xp.shape[1])

def gram(spec, X, Xp):
    """Kernel matrix between two point sets

    Every entry is computed pairwise, so gram(X, X) is exactly symmetric for the
    distance based families.

    :param KernelSpec spec: the kernel
    :param array_like X: n x d points
    :param array_like Xp: n' x d points
    :return ndarray: n x n' matrix with entries K(X_i, Xp_j)
    """

    X = as_points(X)
    Xp = as_points(Xp)
    _check_same_dim(X, Xp)

    if spec.family == "gaussian":
        sq = cdist(X, Xp, "sqeuclidean")
        return np.exp(-sq / (2.0 * spec.bandwidth ** 2))

    if spec.family == "laplacian":
        dist = cdist(X, Xp, "cityblock")
        return np.exp(-dist / spec.bandwidth)

    K = X @ Xp.T
    if Xp is X or (X.shape == Xp.shape and np.array_equal(X, Xp)):
        K = 0.5 * (K + K.T)

    return K

def evaluate(spec, x, xp):
    """K(x, x')

    :param KernelSpec spec: the kernel
    :param array_like x: vector of length d
    :param array_like xp: vector of length d
    :return float: kernel value
    """

    x = np.asarray(x, dtype=np.float64).ravel()
    xp = np.asarray(xp, dtype=np.float64).ravel()

    if x.shape != xp.shape:
        raise DimensionMismatchException(x.shape[0], xp.shape[0])

    return float(gram(spec, x, xp)[0, 0])

def diagonal(spec, X):
    """K(x_i, x_i) for every row of X"""

    X = as_points(X)

    if spec.is_normalized:
        return np.ones(X.shape[0])

    return np.einsum("ij,ij->i", X, X)

def kappa_sq(spec, X=None):
    """sup K(x, x): 1 for the normalized families, the largest diagonal over X otherwise"""

    if spec.is_normalized:
        return 1.0

    if X is None:
        raise InvalidParameterException("X", None, "linear kernel needs points to bound K(x, x)")

    return float(np.max(diagonal(spec, X)))

def rkhs_dist_sq_matrix(spec, X, C):
    """Squared RKHS distances ||phi(x_i) - phi(c_k)||^2, clamped below at 0

    :param KernelSpec spec: the kernel
    :param array_like X: n x d points
    :param array_like C: Q x d centroids
    :return ndarray: n x Q distances
    """

    X = as_points(X)
    C = as_points(C, "centroids")
    _check_same_dim(X, C)

    D = diagonal(spec, X)[:, np.newaxis] + diagonal(spec, C)[np.newaxis, :] \
        - 2.0 * gram(spec, X, C)

    return np.maximum(D, 0.0)

def rkhs_dist_sq(spec, x, c):
    """K(x, x) + K(c, c) - 2 K(x, c), clamped below at 0"""

    x = np.asarray(x, dtype=np.float64).ravel()
    c = np.asarray(c, dtype=np.float64).ravel()

    if x.shape != c.shape:
        raise DimensionMismatchException(x.shape[0], c.shape[0])

    return float(rkhs_dist_sq_matrix(spec, x, c)[0, 0])
