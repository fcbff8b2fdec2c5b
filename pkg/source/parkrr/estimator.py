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
import os
import time
from concurrent.futures import ThreadPoolExecutor
from parkrr.exceptions import DimensionMismatchException, InconsistentInputsException, \
                              InvalidParameterException
from parkrr.kernel import as_points, gram, rkhs_dist_sq_matrix
from parkrr.localsolver import exact_krr, falkon_train, local_predict, local_predict_batch
from parkrr.logmanager import log
from parkrr.numerics import make_rng
from parkrr.partition import Partition, build_partition, points_fingerprint

class ParkModel:
    """Partitioned estimator: one local model per Voronoi cell"""

    kind = "park"

    def __init__(self, spec, partition, centroids, models, lam, m, t, cell_params, timings=None):
        self._spec = spec
        self._partition = partition
        self._centroids = as_points(centroids, "centroids")
        self._models = list(models)
        self._lam = lam
        self._m = m
        self._t = t
        self._cell_params = cell_params
        self._timings = timings or {}

    @property
    def spec(self):
        return self._spec

    @property
    def partition(self):
        return self._partition

    @property
    def centroids(self):
        return self._centroids

    @property
    def models(self):
        return self._models

    @property
    def lam(self):
        return self._lam

    @property
    def m(self):
        return self._m

    @property
    def t(self):
        return self._t

    @property
    def cell_params(self):
        return self._cell_params

    @property
    def timings(self):
        return self._timings

    @property
    def num_cells(self):
        return len(self._models)

    @property
    def dim(self):
        return self._centroids.shape[1]

    def route(self, X):
        """Cell of every query point: nearest centroid, ties to the smallest cell"""

        X = as_points(X, "query points")

        if X.shape[1] != self.dim:
            raise DimensionMismatchException(self.dim, X.shape[1], "query dimension")

        return np.argmin(rkhs_dist_sq_matrix(self._spec, X, self._centroids), axis=1)

    def predict(self, X):
        return park_predict_batch(self, X)

class DncModel:
    """Divide and conquer estimator averaging models trained on random splits"""

    kind = "dnc"

    def __init__(self, spec, splits, models, lam, m, t, cell_params, version="v1",
                 center_multiplier=1.0, timings=None):
        self._spec = spec
        self._splits = [np.asarray(split, dtype=np.int64) for split in splits]
        self._models = list(models)
        self._lam = lam
        self._m = m
        self._t = t
        self._cell_params = cell_params
        self._version = version
        self._center_multiplier = center_multiplier
        self._timings = timings or {}

    @property
    def spec(self):
        return self._spec

    @property
    def splits(self):
        return self._splits

    @property
    def models(self):
        return self._models

    @property
    def lam(self):
        return self._lam

    @property
    def m(self):
        return self._m

    @property
    def t(self):
        return self._t

    @property
    def cell_params(self):
        return self._cell_params

    @property
    def version(self):
        return self._version

    @property
    def center_multiplier(self):
        return self._center_multiplier

    @property
    def timings(self):
        return self._timings

    def predict(self, X):
        return dnc_predict_batch(self, X)

class FalkonModel:
    """A single sketched model on the whole training set"""

    kind = "falkon"

    def __init__(self, spec, model, lam, m, t, timings=None):
        self._spec = spec
        self._model = model
        self._lam = lam
        self._m = m
        self._t = t
        self._timings = timings or {}

    @property
    def spec(self):
        return self._spec

    @property
    def model(self):
        return self._model

    @property
    def lam(self):
        return self._lam

    @property
    def m(self):
        return self._m

    @property
    def t(self):
        return self._t

    @property
    def timings(self):
        return self._timings

    def predict(self, X):
        return local_predict_batch(self._model, self._spec, X)

class KrrModel:
    """Exact kernel ridge regression: x -> sum_i alpha_i K(x_i, x)"""

    kind = "krr"

    def __init__(self, spec, X, alpha, lam, timings=None):
        self._spec = spec
        self._X = as_points(X)
        self._alpha = np.asarray(alpha, dtype=np.float64)
        self._lam = lam
        self._timings = timings or {}

    @property
    def spec(self):
        return self._spec

    @property
    def X(self):
        return self._X

    @property
    def alpha(self):
        return self._alpha

    @property
    def lam(self):
        return self._lam

    @property
    def timings(self):
        return self._timings

    def predict(self, X):
        X = as_points(X, "query points")

        if X.shape[1] != self._X.shape[1]:
            raise DimensionMismatchException(self._X.shape[1], X.shape[1], "query dimension")

        return (gram(self._spec, X, self._X) * self._alpha).sum(axis=1)

def scale_hyperparameters(lam, m, partition, scaling=True, multiplier=1.0):
    """Per-cell regularization and Nyström budget

    With scaling: lam_q = lam / rho_q and m_q = min(ceil(multiplier * m * rho_q), n_q),
    at least 1, where rho_q = n_q / n. Without scaling every cell uses lam and
    min(m, n_q).

    :param float lam: global regularization
    :param int m: global Nyström budget
    :param Partition partition: the partition (anything with cell_sizes)
    :param bool scaling: apply the cell fraction scaling
    :param float multiplier: extra center factor
    :return list: (lam_q, m_q) per cell
    """

    if not lam > 0:
        raise InvalidParameterException("solver.lam", lam, "must be positive")

    if m < 1:
        raise InvalidParameterException("solver.m", m, "must be at least 1")

    sizes = np.asarray(partition.cell_sizes, dtype=np.int64)
    n = int(sizes.sum())
    params = []

    for n_q in sizes.tolist():
        if not scaling:
            params.append((float(lam), int(max(1, min(m, n_q)))))
            continue

        if multiplier == 1.0:
            wanted = -(-m * n_q // n)
        else:
            wanted = int(np.ceil(multiplier * m * n_q / n))

        params.append((lam * n / n_q, int(max(1, min(wanted, n_q)))))

    return params

def _check_training_set(X, Y):
    X = as_points(X)
    Y = np.asarray(Y, dtype=np.float64)

    if Y.ndim != 1 or Y.shape[0] != X.shape[0]:
        raise DimensionMismatchException(X.shape[0], Y.shape, "targets")

    return X, Y

def _check_config(config, n):
    Q = config["partition.q"]
    lam = config["solver.lam"]
    m = config["solver.m"]
    t = config["solver.t"]

    if Q < 1:
        raise InvalidParameterException("partition.q", Q, "must be at least 1")

    if Q > n:
        raise InvalidParameterException("partition.q", Q,
            "exceeds the number of training points ({})".format(n))

    if not lam > 0:
        raise InvalidParameterException("solver.lam", lam, "must be positive")

    if m < Q:
        raise InvalidParameterException("solver.m", m,
            "must be at least partition.q ({}) so every cell gets a center".format(Q))

    if t < 1:
        raise InvalidParameterException("solver.t", t, "must be at least 1")

    return Q, lam, m, t

class _CellStats:
    """Parameters and wall time of one cell training"""

    def __init__(self, n_q, lam_q, m_q, t_q):
        self.n_q = n_q
        self.lam_q = lam_q
        self.m_q = m_q
        self.t_q = t_q
        self.iterations = 0
        self.train_time = 0.0

    def to_dict(self):
        return {
            "n_q": self.n_q,
            "lam_q": self.lam_q,
            "m_q": self.m_q,
            "t_q": self.t_q,
            "iterations": self.iterations,
            "train_time": self.train_time
        }

def _train_cells(X, Y, spec, cells, params, config):
    """Trains one sketched model per index set, sequentially or on a thread pool"""

    t = config["solver.t"]
    seed = config["solver.seed"]
    stats = [_CellStats(cell.shape[0], lam_q, m_q, t) for cell, (lam_q, m_q) in zip(cells, params)]

    def train(q):
        start = time.perf_counter()
        model = falkon_train(X[cells[q]], Y[cells[q]], spec, params[q][0], params[q][1], t,
                             seed=make_rng(seed, q), block_rows=config["solver.block_rows"],
                             tol=config["solver.tol"],
                             verify=config["solver.verify_preconditioner"], indices=cells[q])
        stats[q].train_time = time.perf_counter() - start
        stats[q].iterations = model.iterations
        log.debug("Cell %d: n_q = %d, m_q = %d, lam_q = %.3e, %d iterations", q, stats[q].n_q,
            model.m, params[q][0], model.iterations)
        return model

    workers = config["solver.workers"]
    if workers > 1 and len(cells) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            models = list(pool.map(train, range(len(cells))))
    else:
        models = [train(q) for q in range(len(cells))]

    return models, [s.to_dict() for s in stats]

def _partition(X, spec, Q, config):
    path = config["partition.path"]

    if not path:
        return build_partition(X, spec, Q, config["partition.mode"], config["partition.seed"])

    fingerprint = points_fingerprint(X)

    if not os.path.exists(path):
        partition = build_partition(X, spec, Q, config["partition.mode"],
                                    config["partition.seed"])
        partition.to_json(path, fingerprint)
        log.info("Saved the partition to %s", path)
        return partition

    partition = Partition.from_json(path, fingerprint)

    if partition.n != X.shape[0]:
        raise InconsistentInputsException("partition file {} assigns {} points, the training " \
            "set has {}".format(path, partition.n, X.shape[0]))

    if partition.centroid_indices.max() >= X.shape[0]:
        raise InconsistentInputsException("partition file {} refers to points outside the " \
            "training set".format(path))

    if partition.num_cells != Q:
        log.warning("partition file %s has %d cells, partition.q=%d is ignored", path,
            partition.num_cells, Q)

    log.info("Loaded the partition from %s", path)
    return partition

def park_train(X, Y, spec, config):
    """Trains the partitioned estimator

    Selects the centroids, assigns the points to cells and trains a sketched
    preconditioned model in every cell with the scaled (lam_q, m_q).

    :param ndarray X: n x d training points
    :param ndarray Y: n targets
    :param KernelSpec spec: the kernel
    :param RunConfig config: resolved configuration
    :return ParkModel: the trained model
    """

    X, Y = _check_training_set(X, Y)
    Q, lam, m, t = _check_config(config, X.shape[0])

    start = time.perf_counter()
    partition = _partition(X, spec, Q, config)
    init_time = time.perf_counter() - start

    params = scale_hyperparameters(lam, m, partition, config["solver.scaling"])

    start = time.perf_counter()
    models, cell_params = _train_cells(X, Y, spec, partition.cells, params, config)
    train_time = time.perf_counter() - start

    log.info("Trained %d local models in %.3fs (init %.3fs)", len(models), train_time, init_time)

    return ParkModel(spec, partition, X[partition.centroid_indices], models, lam, m, t,
                     cell_params, {"init": init_time, "train": train_time,
                                   "total": init_time + train_time})

def park_predict(model, x):
    """Prediction of the local model whose centroid is nearest to x

    :param ParkModel model: trained model
    :param array_like x: query point
    :return float: the prediction
    """

    x = np.asarray(x, dtype=np.float64)

    if x.ndim != 1:
        raise DimensionMismatchException("a single point", x.shape, "query")

    q = int(model.route(x)[0])

    return local_predict(model.models[q], model.spec, x)

def park_predict_batch(model, X):
    """park_predict for every row of X, evaluating each local model once on its queries"""

    X = as_points(X, "query points")
    routes = model.route(X)
    out = np.zeros(X.shape[0])

    for q in np.unique(routes):
        rows = np.flatnonzero(routes == q)
        out[rows] = local_predict_batch(model.models[q], model.spec, X[rows])

    return out

def random_splits(n, Q, seed):
    """Q disjoint index sets of sizes within one of n / Q, each sorted"""

    if Q < 1 or Q > n:
        raise InvalidParameterException("partition.q", Q, "must be in [1, {}]".format(n))

    perm = np.random.default_rng(seed).permutation(n)

    return [np.sort(split).astype(np.int64) for split in np.array_split(perm, Q)]

class _Splits:
    def __init__(self, splits):
        self.cell_sizes = [split.shape[0] for split in splits]

def dnc_train(X, Y, spec, config, version="v1"):
    """Trains the divide and conquer baseline on a uniform random split

    v1 uses the scaled (lam_q, m_q) of the partitioned estimator, v2 also multiplies
    the number of centers by dnc.center_multiplier.

    :param ndarray X: n x d training points
    :param ndarray Y: n targets
    :param KernelSpec spec: the kernel
    :param RunConfig config: resolved configuration
    :param string version: v1 or v2
    :return DncModel: the trained model
    """

    if version not in ("v1", "v2"):
        raise InvalidParameterException("version", version, "must be v1 or v2")

    X, Y = _check_training_set(X, Y)
    Q, lam, m, t = _check_config(config, X.shape[0])
    multiplier = config["dnc.center_multiplier"] if version == "v2" else 1.0

    start = time.perf_counter()
    splits = random_splits(X.shape[0], Q, config["partition.seed"])
    init_time = time.perf_counter() - start

    params = scale_hyperparameters(lam, m, _Splits(splits), config["solver.scaling"], multiplier)

    start = time.perf_counter()
    models, cell_params = _train_cells(X, Y, spec, splits, params, config)
    train_time = time.perf_counter() - start

    return DncModel(spec, splits, models, lam, m, t, cell_params, version, multiplier,
                    {"init": init_time, "train": train_time, "total": init_time + train_time})

def dnc_predict(model, x):
    """Average of every local prediction at x"""

    x = np.asarray(x, dtype=np.float64)

    if x.ndim != 1:
        raise DimensionMismatchException("a single point", x.shape, "query")

    return float(np.mean([local_predict(local, model.spec, x) for local in model.models]))

def dnc_predict_batch(model, X):
    X = as_points(X, "query points")

    return np.mean([local_predict_batch(local, model.spec, X) for local in model.models], axis=0)

def falkon_global_train(X, Y, spec, config):
    """One sketched model on all of the training data with the global (lam, m, t)"""

    X, Y = _check_training_set(X, Y)
    lam = config["solver.lam"]
    m = config["solver.m"]
    t = config["solver.t"]

    start = time.perf_counter()
    model = falkon_train(X, Y, spec, lam, m, t, seed=make_rng(config["solver.seed"], 0),
                         block_rows=config["solver.block_rows"], tol=config["solver.tol"],
                         verify=config["solver.verify_preconditioner"])
    train_time = time.perf_counter() - start

    return FalkonModel(spec, model, lam, m, t,
                       {"init": 0.0, "train": train_time, "total": train_time})

def krr_train(X, Y, spec, config):
    """Exact kernel ridge regression on all of the training data"""

    X, Y = _check_training_set(X, Y)
    lam = config["solver.lam"]

    start = time.perf_counter()
    alpha = exact_krr(X, Y, spec, lam)
    train_time = time.perf_counter() - start

    return KrrModel(spec, X, alpha, lam, {"init": 0.0, "train": train_time, "total": train_time})

def train(mode, X, Y, spec, config):
    """Trains the estimator named by a run mode

    :param string mode: one of general.RUN_MODES
    :return object: a model with a predict(X) method
    """

    if mode in ("park", "park-uni"):
        selection = "uniform" if mode == "park-uni" else "greedy"
        if config["partition.mode"] != selection:
            log.warning("run.mode=%s selects %s centroids, ignoring partition.mode=%s", mode,
                selection, config["partition.mode"])
            config = config.override({"partition.mode": selection})
        return park_train(X, Y, spec, config)

    if mode in ("dnc-v1", "dnc-v2"):
        return dnc_train(X, Y, spec, config, mode[4:])

    if mode == "falkon-global":
        return falkon_global_train(X, Y, spec, config)

    if mode == "krr-exact":
        return krr_train(X, Y, spec, config)

    raise InvalidParameterException("run.mode", mode, "unknown run mode")
