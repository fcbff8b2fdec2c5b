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
import scipy.linalg
from parkrr.exceptions import DimensionMismatchException, EmptyCellException, \
                              FactorizationException, InconsistentInputsException, \
                              InvalidParameterException
from parkrr.general import DEFAULT_BLOCK_ROWS, DENSE_PRECONDITIONER_LIMIT, PROBE_MAX_CENTERS, \
                           JITTER_WARN_SCALE, PROBE_TOLERANCE
from parkrr.kernel import as_points, gram
from parkrr.logmanager import log
from parkrr.numerics import EAGER_JITTER, cg, cholesky, make_rng, tri_solve

class NystromSet:
    """Nyström centers of one cell

    positions index the cell's point list, indices are the matching global
    training indices (equal to positions for a standalone training set).
    """

    def __init__(self, positions, indices=None, points=None, clamped=False):
        self._positions = np.asarray(positions, dtype=np.int64)
        self._indices = self._positions if indices is None else np.asarray(indices, dtype=np.int64)
        self._points = None if points is None else as_points(points, "centers")
        self._clamped = clamped

    @property
    def positions(self):
        return self._positions

    @property
    def indices(self):
        return self._indices

    @property
    def points(self):
        return self._points

    @property
    def clamped(self):
        return self._clamped

    @property
    def size(self):
        return self._positions.shape[0]

    def with_points(self, X_cell):
        """Returns a copy holding the center coordinates taken from the cell's points"""

        return NystromSet(self._positions, self._indices, as_points(X_cell)[self._positions],
                          self._clamped)

def sample_nystrom(cell_indices, m_q, seed, X=None):
    """Samples m_q Nyström centers uniformly without replacement from a cell

    :param array_like cell_indices: global indices of the cell's points
    :param int m_q: requested number of centers, clamped to the cell size
    :param int|Generator seed: random seed
    :param ndarray X: all training points; when given the centers carry their coordinates
    :return NystromSet: the centers, positions in increasing order
    """

    cell_indices = np.asarray(cell_indices, dtype=np.int64)
    n_q = cell_indices.shape[0]

    if n_q == 0:
        raise EmptyCellException()

    if m_q < 1:
        raise InvalidParameterException("m_q", m_q, "must be at least 1")

    clamped = m_q >= n_q
    if clamped:
        if m_q > n_q:
            log.debug("Nyström budget %d clamped to the cell size %d", m_q, n_q)
        positions = np.arange(n_q, dtype=np.int64)
    else:
        positions = np.sort(make_rng(seed).choice(n_q, size=m_q, replace=False)).astype(np.int64)

    indices = cell_indices[positions]
    points = None if X is None else as_points(X)[indices]

    return NystromSet(positions, indices, points, clamped)

class Preconditioner:
    """Sketched preconditioner B = (1 / sqrt(n)) T^-T A^-T

    T T^T = K_m + jitter and A A^T = T^T T / m + lam * I, both lower triangular,
    so that B B^T = ((n / m) K_m^2 + lam * n * K_m)^-1 up to the jitter.
    """

    def __init__(self, T, A, n, m, lam):
        self._T = T
        self._A = A
        self._n = n
        self._m = m
        self._lam = lam
        self._scale = 1.0 / np.sqrt(n)

    @property
    def T(self):
        return self._T

    @property
    def A(self):
        return self._A

    @property
    def n(self):
        return self._n

    @property
    def m(self):
        return self._m

    @property
    def lam(self):
        return self._lam

    @property
    def jitter(self):
        return {"T": self._T.jitter_used, "A": self._A.jitter_used}

    def apply(self, v):
        """B v"""

        w = tri_solve(self._A, v, "lower_transposed")
        return self._scale * tri_solve(self._T, w, "lower_transposed")

    def apply_transpose(self, v):
        """B^T v"""

        w = tri_solve(self._T, v, "lower")
        return self._scale * tri_solve(self._A, w, "lower")

    def dense(self):
        if self._m > DENSE_PRECONDITIONER_LIMIT:
            raise InvalidParameterException("m", self._m,
                "preconditioners above {} centers are never materialized".format(
                    DENSE_PRECONDITIONER_LIMIT))

        return self.apply(np.eye(self._m))

    def probe(self, K_m, rng=None, probes=5):
        """Largest relative error of B B^T ((n / m) K_m^2 + lam * n * K_m) v = v over random v

        :param ndarray K_m: the center Gram matrix the preconditioner was built from
        :param Generator rng: random generator for the probe vectors
        :param int probes: number of probe vectors
        :return float: max_v ||B B^T M v - v|| / ||v||
        """

        rng = make_rng(0 if rng is None else rng)
        V = rng.standard_normal((self._m, probes))
        KV = K_m @ V
        MV = (self._n / self._m) * (K_m @ KV) + self._lam * self._n * KV
        R = self.apply(self.apply_transpose(MV)) - V

        return float(np.max(np.linalg.norm(R, axis=0) / np.linalg.norm(V, axis=0)))

def build_preconditioner(K_m, n_q, m_q, lam_q, verify=True, rng=None):
    """Factorizes the sketched preconditioner of one cell

    :param ndarray K_m: m_q x m_q Gram matrix of the centers
    :param int n_q: number of points in the cell
    :param int m_q: number of centers
    :param float lam_q: local regularization
    :param bool verify: probe the result when m_q is small
    :param Generator rng: random generator for the probe
    :return Preconditioner: the preconditioner
    """

    K_m = np.asarray(K_m, dtype=np.float64)

    if not lam_q > 0:
        raise InvalidParameterException("lam_q", lam_q, "must be positive")

    if K_m.ndim != 2 or K_m.shape != (m_q, m_q):
        raise DimensionMismatchException((m_q, m_q), K_m.shape, "center Gram matrix")

    if n_q < 1:
        raise InvalidParameterException("n_q", n_q, "must be at least 1")

    T = cholesky(K_m, EAGER_JITTER, name="preconditioner factor T (center Gram matrix)")
    inner = T.L.T @ T.L / m_q + lam_q * np.eye(m_q)
    inner = (inner + inner.T) / 2
    A = cholesky(inner, name="preconditioner factor A (T^T T / m + lam I)")

    precond = Preconditioner(T, A, n_q, m_q, lam_q)

    if verify and m_q <= PROBE_MAX_CENTERS:
        error = precond.probe(K_m, rng)
        if error > PROBE_TOLERANCE:
            log.warning("Preconditioner probe error %.3e exceeds %.0e (m = %d, jitter %.3e)",
                error, PROBE_TOLERANCE, m_q, T.jitter_used)
        else:
            log.debug("Preconditioner probe error %.3e (m = %d)", error, m_q)

    return precond

class LocalModel:
    """Trained local estimator x -> sum_i alpha_i K(center_i, x)"""

    def __init__(self, centers, alpha, lam, iterations=0, trace=None, objective=None):
        if centers.points is None:
            raise InconsistentInputsException("local model centers need their coordinates")

        alpha = np.asarray(alpha, dtype=np.float64)
        if alpha.shape != (centers.size,):
            raise DimensionMismatchException(centers.size, alpha.shape, "coefficients")

        self._centers = centers
        self._alpha = alpha
        self._lam = lam
        self._iterations = iterations
        self._trace = trace
        self._objective = objective

    @property
    def centers(self):
        return self._centers

    @property
    def alpha(self):
        return self._alpha

    @property
    def lam(self):
        return self._lam

    @property
    def iterations(self):
        return self._iterations

    @property
    def trace(self):
        return self._trace

    @property
    def objective(self):
        return self._objective

    @property
    def m(self):
        return self._centers.size

    @property
    def dim(self):
        return self._centers.points.shape[1]

def _kernel_blocks(spec, X, centers, block_rows):
    for start in range(0, X.shape[0], block_rows):
        yield start, gram(spec, X[start:start + block_rows], centers)

def _check_block_rows(block_rows):
    if block_rows < 1:
        raise InvalidParameterException("solver.block_rows", block_rows, "must be at least 1")

def _check_targets(X, Y):
    X = as_points(X)
    Y = np.asarray(Y, dtype=np.float64)

    if Y.ndim != 1 or Y.shape[0] != X.shape[0]:
        raise DimensionMismatchException(X.shape[0], Y.shape, "targets")

    return X, Y

def _center_points(centers, X_q):
    if centers.points is not None:
        return centers.points

    return as_points(X_q)[centers.positions]

def exact_krr(X, Y, spec, lam):
    """Solves (K_n + lam * n * I) alpha = Y by Cholesky

    :param ndarray X: n x d points
    :param ndarray Y: n targets
    :param KernelSpec spec: the kernel
    :param float lam: regularization
    :return ndarray: coefficients alpha
    """

    X, Y = _check_targets(X, Y)
    n = X.shape[0]

    if not lam > 0:
        raise InvalidParameterException("lam", lam, "must be positive")

    if n < 1:
        raise InvalidParameterException("n", n, "needs at least one point")

    K = gram(spec, X, X)
    factor = cholesky(K + lam * n * np.eye(n), name="K + lam n I")

    return tri_solve(factor, tri_solve(factor, Y, "lower"), "lower_transposed")

def exact_nystrom(X_q, Y_q, centers, spec, lam_q):
    """Exact minimizer of the Nyström-restricted local objective

    Solves (K_nm^T K_nm + lam * n * K_m) alpha = K_nm^T Y, falling back to the
    minimum norm least squares solution when the system stays singular.

    :param ndarray X_q: n_q x d cell points
    :param ndarray Y_q: n_q targets
    :param NystromSet centers: the centers
    :param KernelSpec spec: the kernel
    :param float lam_q: local regularization
    :return ndarray: coefficients of length m_q
    """

    X_q, Y_q = _check_targets(X_q, Y_q)

    if not lam_q > 0:
        raise InvalidParameterException("lam_q", lam_q, "must be positive")

    C = _center_points(centers, X_q)
    n_q = X_q.shape[0]
    K_nm = gram(spec, X_q, C)
    K_m = gram(spec, C, C)

    H = K_nm.T @ K_nm + lam_q * n_q * K_m
    H = (H + H.T) / 2
    rhs = K_nm.T @ Y_q

    try:
        factor = cholesky(H, name="Nyström normal equations")
        limit = JITTER_WARN_SCALE * np.trace(H) / H.shape[0]
        if factor.jitter_used > limit:
            log.warning("Nyström normal equations needed jitter %.3e (> %.3e), the solution "
                "is regularized beyond lam_q", factor.jitter_used, limit)
        return tri_solve(factor, tri_solve(factor, rhs, "lower"), "lower_transposed")
    except FactorizationException as e:
        log.warning("%s; using the minimum norm solution", e)

        try:
            return scipy.linalg.lstsq(H, rhs, check_finite=False)[0]
        except (np.linalg.LinAlgError, ValueError):
            raise FactorizationException(e.jitter, "Nyström normal equations (least squares)")

def nystrom_objective(X_q, Y_q, centers, spec, lam_q, alpha, block_rows=DEFAULT_BLOCK_ROWS):
    """(1 / n) ||K_nm alpha - Y||^2 + lam * alpha^T K_m alpha"""

    X_q, Y_q = _check_targets(X_q, Y_q)
    C = _center_points(centers, X_q)
    alpha = np.asarray(alpha, dtype=np.float64)

    loss = 0.0
    for start, block in _kernel_blocks(spec, X_q, C, block_rows):
        r = block @ alpha - Y_q[start:start + block.shape[0]]
        loss += r @ r

    return loss / X_q.shape[0] + lam_q * (alpha @ (gram(spec, C, C) @ alpha))

def pcg_train(X_q, Y_q, centers, precond, spec, lam_q, t_q, block_rows=DEFAULT_BLOCK_ROWS,
              tol=0.0, record_objective=False):
    """Preconditioned conjugate gradient on the Nyström objective

    Runs t_q iterations of CG on
      B^T ((1 / n) K_nm^T K_nm + lam * K_m) B beta = B^T K_nm^T Y / n
    and returns alpha = B beta. K_nm is streamed in blocks of block_rows rows.

    :param ndarray X_q: n_q x d cell points
    :param ndarray Y_q: n_q targets
    :param NystromSet centers: the centers
    :param Preconditioner precond: preconditioner built on the centers
    :param KernelSpec spec: the kernel
    :param float lam_q: local regularization
    :param int t_q: number of iterations
    :param int block_rows: rows of K_nm held in memory at once
    :param float tol: relative residual tolerance for an early stop
    :param bool record_objective: evaluate the objective after every iteration
    :return LocalModel: the trained model
    """

    X_q, Y_q = _check_targets(X_q, Y_q)
    _check_block_rows(block_rows)

    if t_q < 1:
        raise InvalidParameterException("t_q", t_q, "must be at least 1")

    C = _center_points(centers, X_q)
    n_q = X_q.shape[0]
    m_q = C.shape[0]

    if precond.m != m_q:
        raise DimensionMismatchException(m_q, precond.m, "preconditioner size")

    located = NystromSet(centers.positions, centers.indices, C, centers.clamped)
    K_m = gram(spec, C, C)

    def normal_product(v):
        out = lam_q * (K_m @ v)
        acc = np.zeros(m_q)
        for _, block in _kernel_blocks(spec, X_q, C, block_rows):
            acc += block.T @ (block @ v)

        return out + acc / n_q

    def apply(beta):
        return precond.apply_transpose(normal_product(precond.apply(beta)))

    rhs = np.zeros(m_q)
    for start, block in _kernel_blocks(spec, X_q, C, block_rows):
        rhs += block.T @ Y_q[start:start + block.shape[0]]
    rhs = precond.apply_transpose(rhs / n_q)

    objective = None
    callback = None
    if record_objective:
        objective = [float(Y_q @ Y_q) / n_q]

        def callback(it, beta):
            objective.append(nystrom_objective(X_q, Y_q, located, spec, lam_q,
                                               precond.apply(beta), block_rows))

    beta, trace = cg(apply, rhs, t_q, tol, callback)
    alpha = precond.apply(beta)

    log.debug("PCG: n = %d, m = %d, %d iterations, final residual %s", n_q, m_q,
        trace.iterations, trace.residuals[-1] if trace.residuals else 0.0)

    return LocalModel(located, alpha, lam_q, trace.iterations, trace, objective)

def falkon_train(X, Y, spec, lam, m, t, seed=0, block_rows=DEFAULT_BLOCK_ROWS, tol=0.0,
                 verify=True, indices=None, record_objective=False):
    """Samples centers, builds the preconditioner and runs PCG on one training set

    :param ndarray X: n x d points
    :param ndarray Y: n targets
    :param KernelSpec spec: the kernel
    :param float lam: regularization
    :param int m: Nyström budget
    :param int t: CG iterations
    :param int|Generator seed: random seed for the center sample
    :param array_like indices: global indices of the points, defaults to 0 .. n - 1
    :return LocalModel: the trained model
    """

    X, Y = _check_targets(X, Y)
    n = X.shape[0]
    indices = np.arange(n) if indices is None else np.asarray(indices, dtype=np.int64)

    if indices.shape[0] != n:
        raise DimensionMismatchException(n, indices.shape[0], "global indices")

    rng = make_rng(seed)
    centers = sample_nystrom(indices, m, rng).with_points(X)
    K_m = gram(spec, centers.points, centers.points)
    precond = build_preconditioner(K_m, n, centers.size, lam, verify, rng)

    return pcg_train(X, Y, centers, precond, spec, lam, t, block_rows, tol, record_objective)

def local_predict_batch(model, spec, X):
    """Evaluates a local model on every row of X"""

    X = as_points(X, "query points")

    if X.shape[1] != model.dim:
        raise DimensionMismatchException(model.dim, X.shape[1], "query dimension")

    K = gram(spec, X, model.centers.points)

    return (K * model.alpha).sum(axis=1)

def local_predict(model, spec, x):
    """Evaluates a local model at one point

    :param LocalModel model: trained model
    :param KernelSpec spec: the kernel
    :param array_like x: query point of dimension d
    :return float: sum_i alpha_i K(center_i, x)
    """

    x = np.asarray(x, dtype=np.float64)

    if x.ndim != 1:
        raise DimensionMismatchException("a single point", x.shape, "query")

    return float(local_predict_batch(model, spec, x[None, :])[0])
