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

import csv
import json
import numpy as np
import os
import struct
from parkrr.diagnostics import GroundTruth
from parkrr.exceptions import ArtifactFormatException, DatasetParseException, \
                              DimensionMismatchException, InvalidParameterException
from parkrr.general import DATASET_MAGIC, MEDIAN_HEURISTIC_POINTS, TASKS
from parkrr.kernel import as_points, gram
from parkrr.logmanager import log
from parkrr.numerics import make_rng
from scipy.spatial.distance import pdist

_CACHE_HEADER = struct.Struct("<QQB")

class Dataset:
    """Training points and targets, optionally with a ground truth and a held out part"""

    def __init__(self, X, Y, truth=None, name="dataset", task="regression", holdout=None):
        X = as_points(X)
        Y = np.asarray(Y, dtype=np.float64)

        if Y.ndim != 1 or Y.shape[0] != X.shape[0]:
            raise DimensionMismatchException(X.shape[0], Y.shape, "targets")

        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
            raise InvalidParameterException("dataset", name, "contains non-finite values")

        if task not in TASKS:
            raise InvalidParameterException("data.task", task,
                "must be one of {}".format(", ".join(TASKS)))

        self._X = X
        self._Y = Y
        self._truth = truth
        self._name = name
        self._task = task
        self._holdout = holdout

    @property
    def X(self):
        return self._X

    @property
    def Y(self):
        return self._Y

    @property
    def truth(self):
        return self._truth

    @property
    def name(self):
        return self._name

    @property
    def task(self):
        return self._task

    @property
    def holdout(self):
        """(X_test, Y_test) or None"""

        return self._holdout

    @property
    def n(self):
        return self._X.shape[0]

    @property
    def d(self):
        return self._X.shape[1]

    @property
    def is_synthetic(self):
        return self._truth is not None

    def metadata(self):
        return {
            "name": self._name,
            "n": self.n,
            "d": self.d,
            "task": self._task,
            "synthetic": self.is_synthetic,
            "n_test": 0 if self._holdout is None else int(self._holdout[0].shape[0])
        }

def _blob_points(rng, count, d, clusters, separation, blob_scale, axis_aligned, leak, centers):
    labels = rng.permutation(np.arange(count) % clusters)

    if axis_aligned:
        axes = np.eye(d)[labels % d]
        radial = separation * blob_scale + blob_scale * rng.standard_normal(count)
        X = axes * radial[:, np.newaxis]
        if leak:
            X += leak * blob_scale * rng.standard_normal((count, d))
        return X, labels

    return centers[labels] + blob_scale * rng.standard_normal((count, d)), labels

def synth_fixed_design(n, d, clusters, sigma, seed, spec, separation=5.0, blob_scale=1.0,
                       sparsity=0.05, n_test=0, axis_aligned=False, leak=0.0):
    """Clustered design with a target in the span of the training features

    Points come from `clusters` gaussian blobs of scale blob_scale whose centers
    lie about separation * blob_scale apart. With axis_aligned the blob of cluster c lies on
    the c-th coordinate axis (plus `leak` isotropic noise), which makes the
    feature spans of the clusters nearly orthogonal under the linear kernel.

    f* = sum_j w_j K(x_j, .) has round(sparsity * n) nonzero coefficients on the
    training points, scaled to ||f*|| = 1, and Y = f*(X) + sigma * eps. The ground truth
    keeps the support points as its anchors.

    :param int n: training points
    :param int d: dimension
    :param int clusters: number of blobs
    :param float sigma: noise standard deviation
    :param int seed: random seed
    :param KernelSpec spec: kernel of the target function
    :param int n_test: extra held out points from the same mixture
    :return Dataset: the dataset with its ground truth
    """

    for name, value in (("synth.n", n), ("synth.d", d), ("synth.clusters", clusters)):
        if value < 1:
            raise InvalidParameterException(name, value, "must be at least 1")

    if sigma < 0:
        raise InvalidParameterException("synth.noise", sigma, "must be nonnegative")

    if not 0 < sparsity <= 1:
        raise InvalidParameterException("synth.sparsity", sparsity, "must lie in (0, 1]")

    if n_test < 0:
        raise InvalidParameterException("synth.n_test", n_test, "must be nonnegative")

    if axis_aligned and clusters > d:
        raise InvalidParameterException("synth.clusters", clusters,
            "axis aligned blobs need clusters <= d ({})".format(d))

    rng = make_rng(seed)
    centers = separation * blob_scale * rng.standard_normal((clusters, d)) / np.sqrt(2.0 * d)
    X, _ = _blob_points(rng, n + n_test, d, clusters, separation, blob_scale, axis_aligned, leak,
                        centers)
    X_train, X_test = X[:n], X[n:]

    support = rng.choice(n, size=max(1, int(round(sparsity * n))), replace=False)
    w = rng.standard_normal(support.shape[0])

    # only the support columns of the Gram matrix
    K = gram(spec, X_train, X_train[support])
    norm_sq = float(w @ K[support] @ w)
    if not norm_sq > 0:
        raise InvalidParameterException("synth.sparsity", sparsity,
                                        "target function vanishes on this design")
    w /= np.sqrt(norm_sq)

    truth = GroundTruth(X_train[support], w, spec, sigma)
    f_train = K @ w
    Y = f_train + sigma * rng.standard_normal(n)

    holdout = None
    if n_test:
        holdout = (X_test, truth.values(X_test) + sigma * rng.standard_normal(n_test))

    log.info("Synthetic design: n = %d, d = %d, %d clusters, %d nonzero target coefficients",
        n, d, clusters, support.shape[0])

    return Dataset(X_train, Y, truth, "synth", "regression", holdout)

def _map_binary(labels, path):
    values = np.unique(labels)

    if values.shape[0] > 2:
        raise DatasetParseException(path, 0, "binary task needs two label values, found {}".format(
            values.shape[0]))

    if set(values.tolist()) <= {-1.0, 1.0}:
        return labels

    if values.shape[0] == 1:
        return np.where(labels > 0, 1.0, -1.0)

    return np.where(labels == values[1], 1.0, -1.0)

def _read_rows(path, delimiter, header, min_width):
    """Numeric rows of a delimited file; blank lines are skipped"""

    rows = []
    width = None

    with open(path, newline="") as f:
        reader = csv.reader(f, delimiter=delimiter)

        for row in reader:
            line = reader.line_num

            if header and line == 1:
                continue

            if not row or all(not cell.strip() for cell in row):
                continue

            if width is None:
                width = len(row)
                if width < min_width:
                    raise DatasetParseException(path, line,
                        "expected at least {} columns, got {}".format(min_width, width))
            elif len(row) != width:
                raise DatasetParseException(path, line, "expected {} columns, got {}".format(
                    width, len(row)))

            try:
                values = [float(cell) for cell in row]
            except ValueError:
                bad = next(j for j, cell in enumerate(row) if not _is_number(cell))
                raise DatasetParseException(path, line,
                    "non-numeric value '{}' in column {}".format(row[bad], bad))

            if not all(np.isfinite(values)):
                raise DatasetParseException(path, line, "non-finite value")

            rows.append(values)

    if not rows:
        raise DatasetParseException(path, 0, "no data rows")

    return np.array(rows, dtype=np.float64)

def load_csv(path, label_column=-1, delimiter=",", header=False, task="regression"):
    """Reads a delimited text file into a dataset

    :param string path: input file
    :param int label_column: column of the target (negative counts from the end)
    :param string delimiter: field delimiter
    :param bool header: the first line holds column names
    :param string task: regression or binary (labels mapped to +1 / -1)
    :return Dataset: the dataset, rows in file order
    """

    if task not in TASKS:
        raise InvalidParameterException("data.task", task, "must be one of {}".format(
            ", ".join(TASKS)))

    data = _read_rows(path, delimiter, header, 2)
    width = data.shape[1]

    if not -width <= label_column < width:
        raise InvalidParameterException("data.label_column", label_column,
            "file has {} columns".format(width))

    label = label_column % width
    Y = data[:, label]
    X = np.delete(data, label, axis=1)

    if task == "binary":
        Y = _map_binary(Y, path)

    log.info("Loaded %s: %d rows, %d features", path, X.shape[0], X.shape[1])

    return Dataset(X, Y, None, os.path.basename(path), task)

def load_points(path, delimiter=",", header=False):
    """Reads unlabeled query points, one per row"""

    return _read_rows(path, delimiter, header, 1)

def _is_number(cell):
    try:
        float(cell)
        return True
    except ValueError:
        return False

def split_holdout(dataset, test_fraction, seed):
    """Moves a random test_fraction of the rows into the held out part"""

    if not 0 <= test_fraction < 1:
        raise InvalidParameterException("data.test_fraction", test_fraction, "must lie in [0, 1)")

    n_test = int(round(test_fraction * dataset.n))
    if n_test == 0:
        return dataset

    perm = make_rng(seed).permutation(dataset.n)
    test, train = np.sort(perm[:n_test]), np.sort(perm[n_test:])

    if train.shape[0] == 0:
        raise InvalidParameterException("data.test_fraction", test_fraction,
                                        "leaves no training rows")

    return Dataset(dataset.X[train], dataset.Y[train], None, dataset.name, dataset.task,
                   (dataset.X[test], dataset.Y[test]))

def write_cache(dataset, path):
    """Writes X and Y to the PKDS1 binary cache

    Layout: magic, uint64 n, uint64 d, uint8 task, then X row-major and Y as
    little-endian float64.
    """

    with open(path, "wb") as f:
        f.write(DATASET_MAGIC)
        f.write(_CACHE_HEADER.pack(dataset.n, dataset.d, TASKS.index(dataset.task)))
        f.write(np.ascontiguousarray(dataset.X, dtype="<f8").tobytes())
        f.write(np.ascontiguousarray(dataset.Y, dtype="<f8").tobytes())

def read_cache(path):
    with open(path, "rb") as f:
        data = f.read()

    if not data.startswith(DATASET_MAGIC):
        raise ArtifactFormatException(path, "bad magic (expected {!r})".format(DATASET_MAGIC))

    offset = len(DATASET_MAGIC)
    if len(data) < offset + _CACHE_HEADER.size:
        raise ArtifactFormatException(path, "truncated header")

    n, d, task = _CACHE_HEADER.unpack_from(data, offset)
    offset += _CACHE_HEADER.size

    if task >= len(TASKS):
        raise ArtifactFormatException(path, "unknown task id {}".format(task))

    if len(data) != offset + 8 * n * (d + 1):
        raise ArtifactFormatException(path, "expected {} payload bytes, found {}".format(
            8 * n * (d + 1), len(data) - offset))

    X = np.frombuffer(data, dtype="<f8", count=n * d, offset=offset).reshape(n, d)
    Y = np.frombuffer(data, dtype="<f8", count=n, offset=offset + 8 * n * d)

    return Dataset(X.astype(np.float64), Y.astype(np.float64), None,
                   os.path.basename(path), TASKS[task])

def write_truth(truth, path):
    """Ground truth sidecar (JSON) of a synthetic dataset"""

    with open(path, "w") as f:
        json.dump(truth.to_dict(), f)

def read_truth(path):
    with open(path, "r") as f:
        return GroundTruth.from_dict(json.load(f))

def median_bandwidth(X, seed=0, max_points=MEDIAN_HEURISTIC_POINTS):
    """Median pairwise euclidean distance on a random subsample of at most max_points rows

    :param ndarray X: n x d points
    :param int seed: random seed of the subsample
    :param int max_points: subsample size
    :return float: the bandwidth
    """

    X = as_points(X)

    if X.shape[0] < 2:
        raise InvalidParameterException("kernel.bandwidth", "median", "needs at least two points")

    if X.shape[0] > max_points:
        X = X[np.sort(make_rng(seed).choice(X.shape[0], size=max_points, replace=False))]

    median = float(np.median(pdist(X)))

    if not median > 0:
        raise InvalidParameterException("kernel.bandwidth", "median",
                                        "all sampled points coincide")

    return median
