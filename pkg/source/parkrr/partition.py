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

import hashlib
import json
import numpy as np
import time
from parkrr.exceptions import ArtifactFormatException, DegenerateRankException, \
                              InconsistentInputsException, InvalidParameterException
from parkrr.general import GREEDY_RESIDUAL_FLOOR, PARTITION_MODES
from parkrr.kernel import as_points, diagonal, gram, rkhs_dist_sq_matrix
from parkrr.logmanager import log
from parkrr.numerics import make_rng

class Partition:
    """Voronoi partition of the training set in feature space

    Cell q holds the training indices whose nearest centroid (RKHS distance,
    ties to the smallest q) is centroid_indices[q].
    """

    def __init__(self, centroid_indices, assignment, mode="greedy", stats=None):
        self._centroid_indices = np.asarray(centroid_indices, dtype=np.int64)
        self._assignment = np.asarray(assignment, dtype=np.int64)
        self._mode = mode
        self._stats = stats or {}

        Q = self._centroid_indices.shape[0]
        if self._assignment.size and (self._assignment.min() < 0 or self._assignment.max() >= Q):
            raise InconsistentInputsException(
                "assignment refers to cells outside [0, {})".format(Q))

        # a stable sort keeps the indices of each cell in increasing order
        order = np.argsort(self._assignment, kind="stable")
        bounds = np.searchsorted(self._assignment[order], np.arange(Q + 1))
        self._cells = [order[bounds[q]:bounds[q + 1]] for q in range(Q)]

    @property
    def centroid_indices(self):
        return self._centroid_indices

    @property
    def assignment(self):
        return self._assignment

    @property
    def cells(self):
        return self._cells

    @property
    def mode(self):
        return self._mode

    @property
    def stats(self):
        return self._stats

    @property
    def n(self):
        return self._assignment.shape[0]

    @property
    def num_cells(self):
        return self._centroid_indices.shape[0]

    @property
    def cell_sizes(self):
        return np.array([cell.shape[0] for cell in self._cells], dtype=np.int64)

    @property
    def cell_fractions(self):
        return self.cell_sizes / float(self.n)

    def to_dict(self):
        return {
            "mode": self._mode,
            "centroid_indices": self._centroid_indices.tolist(),
            "assignment": self._assignment.tolist(),
            "stats": self._stats
        }

    @classmethod
    def from_dict(cls, data):
        return cls(data["centroid_indices"], data["assignment"], data.get("mode", "greedy"),
                   data.get("stats"))

    def to_json(self, path, fingerprint=None):
        """Writes the partition (centroid indices + assignment) to a JSON file

        :param string path: target file
        :param string fingerprint: points_fingerprint() of the training points
        """

        data = self.to_dict()
        data["fingerprint"] = fingerprint

        with open(path, "w") as f:
            json.dump(data, f, allow_nan=False)

    @classmethod
    def from_json(cls, path, fingerprint=None):
        """Reads a partition written by to_json

        With a fingerprint the file must describe the same training points.
        """

        try:
            with open(path, "r") as f:
                data = json.load(f)
            partition = cls.from_dict(data)
        except (ValueError, KeyError, TypeError) as e:
            raise ArtifactFormatException(path, "unreadable partition ({})".format(e))

        stored = data.get("fingerprint")
        if fingerprint and stored and stored != fingerprint:
            raise InconsistentInputsException(
                "partition file {} was built for other training points".format(path))

        return partition

def points_fingerprint(X):
    """SHA-256 of the shape and the float64 bytes of the points"""

    X = np.ascontiguousarray(as_points(X), dtype=np.float64)
    digest = hashlib.sha256("{}x{}".format(*X.shape).encode("ascii"))
    digest.update(X.tobytes())

    return digest.hexdigest()

def _check_q(Q, n):
    if Q < 1:
        raise InvalidParameterException("Q", Q, "must be at least 1")

    if Q > n:
        raise InvalidParameterException("Q", Q, "exceeds the number of points ({})".format(n))

def greedy_selection_trace(X, spec, Q):
    """Greedy Schur complement selection with its residual history

    Maintains the pivoted Cholesky rows F (q x n) of the selected centroids, so that
    the residual diagonal K(c, c) - F[:, c]^T F[:, c] equals the Schur complement
    of every candidate c with respect to the selected set.

    :param ndarray X: n x d points
    :param KernelSpec spec: the kernel
    :param int Q: number of centroids
    :return tuple: (Q selected indices, Q x n residuals seen before each selection)
    """

    X = as_points(X)
    n = X.shape[0]
    _check_q(Q, n)

    residual = diagonal(spec, X).astype(np.float64)
    floor = GREEDY_RESIDUAL_FLOOR * float(np.max(residual)) if n else 0.0
    available = np.ones(n, dtype=bool)
    F = np.zeros((Q, n))
    history = np.zeros((Q, n))
    selected = []

    for q in range(Q):
        history[q] = residual
        scores = np.where(available, residual, -np.inf)
        j = int(np.argmax(scores))

        if not scores[j] > floor:
            raise DegenerateRankException(q, Q)

        selected.append(j)
        available[j] = False

        col = gram(spec, X, X[j:j + 1])[:, 0]
        row = (col - F[:q].T @ F[:q, j]) / np.sqrt(residual[j])
        F[q] = row

        residual = residual - row ** 2
        residual[j] = 0.0

        # round-off: clamp and retire
        negative = residual < 0
        if np.any(negative & available):
            log.debug("Greedy selection: %d negative residuals clamped",
                int(np.sum(negative & available)))
        available &= ~negative
        residual[negative] = 0.0

    return np.array(selected, dtype=np.int64), history

def greedy_centroids(X, spec, Q):
    """Selects Q centroids greedily by their Schur complement

    The first centroid maximizes K(c, c); every following one maximizes the
    residual variance of phi(c) given the centroids chosen so far. Ties go to
    the smallest index.

    :param ndarray X: n x d points
    :param KernelSpec spec: the kernel
    :param int Q: number of centroids
    :return ndarray: Q distinct indices into X
    """

    return greedy_selection_trace(X, spec, Q)[0]

def uniform_centroids(X, Q, seed):
    """Samples Q distinct centroid indices uniformly without replacement

    :param ndarray X: n x d points
    :param int Q: number of centroids
    :param int|Generator seed: random seed
    :return ndarray: Q distinct indices into X
    """

    n = as_points(X).shape[0]
    _check_q(Q, n)

    return make_rng(seed).choice(n, size=Q, replace=False).astype(np.int64)

def assign(X, centroids, spec):
    """Assigns every point to its nearest centroid in the RKHS metric

    :param ndarray X: n x d points
    :param array_like centroids: indices into X of the centroids
    :param KernelSpec spec: the kernel
    :return ndarray: n cell ids, ties resolved to the smallest cell id
    """

    X = as_points(X)
    centroids = np.asarray(centroids, dtype=np.int64)

    if centroids.size == 0:
        raise InvalidParameterException("centroids", [], "needs at least one centroid")

    D = rkhs_dist_sq_matrix(spec, X, X[centroids])
    D[centroids, np.arange(centroids.shape[0])] = 0.0

    # argmin returns the first minimum
    return np.argmin(D, axis=1).astype(np.int64)

def build_partition(X, spec, Q, mode="greedy", seed=0):
    """Centroid selection followed by assignment

    Cells left empty by exact ties are dropped and the remaining cells renumbered
    in order; the number of dropped cells is recorded in the stats.

    :param ndarray X: n x d points
    :param KernelSpec spec: the kernel
    :param int Q: number of centroids
    :param string mode: greedy or uniform
    :param int seed: random seed for uniform mode
    :return Partition: the partition
    """

    if mode not in PARTITION_MODES:
        raise InvalidParameterException("partition.mode", mode,
            "must be one of {}".format(", ".join(PARTITION_MODES)))

    X = as_points(X)
    start = time.perf_counter()

    if mode == "greedy":
        centroids = greedy_centroids(X, spec, Q)
    else:
        centroids = uniform_centroids(X, Q, seed)

    selected = time.perf_counter()
    assignment = assign(X, centroids, spec)
    sizes = np.bincount(assignment, minlength=Q)

    dropped = int(np.sum(sizes == 0))
    if dropped:
        keep = np.flatnonzero(sizes > 0)
        renumber = -np.ones(Q, dtype=np.int64)
        renumber[keep] = np.arange(keep.shape[0])
        centroids = centroids[keep]
        assignment = renumber[assignment]
        sizes = sizes[keep]
        log.warning("Dropped %d empty cells (exact ties between centroids).", dropped)

    finished = time.perf_counter()
    stats = {
        "requested_cells": int(Q),
        "cells": int(centroids.shape[0]),
        "empty_dropped": dropped,
        "min_size": int(sizes.min()),
        "max_size": int(sizes.max()),
        "mean_size": float(sizes.mean()),
        "selection_time": selected - start,
        "assignment_time": finished - selected
    }

    log.info("Partition (%s): %d cells, sizes min %d / mean %.1f / max %d", mode,
        stats["cells"], stats["min_size"], stats["mean_size"], stats["max_size"])

    return Partition(centroids, assignment, mode, stats)
