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
from parkrr.exceptions import AsymmetricMatrixException, ConjugateGradientException, \
                              DimensionMismatchException, EigensolverException, \
                              FactorizationException, InvalidParameterException, \
                              SingularMatrixException
from parkrr.general import JITTER_SCALE, JITTER_GROWTH, JITTER_MAX_ESCALATIONS, \
                           SYMMETRY_TOLERANCE
from parkrr.logmanager import log

TRI_SIDES = ("lower", "upper", "lower_transposed")

def make_rng(seed, *stream):
    """Returns a numpy Generator for seed, optionally split into an independent stream

    make_rng(seed, q) is the stream of cell q; it does not depend on how many
    other streams exist or in which order they are consumed.

    :param int|Generator seed: base seed or an existing generator
    :param int stream: stream identifiers
    :return Generator: random generator
    """

    if isinstance(seed, np.random.Generator):
        return seed

    if stream:
        return np.random.default_rng([int(seed)] + [int(s) for s in stream])

    return np.random.default_rng(seed)

class JitterPolicy:
    """Diagonal shift schedule for Cholesky factorizations

    The shifts are scale * trace / m * growth^k for k = 0 .. max_escalations. When
    eager is False the matrix is first factorized as is.
    """

    def __init__(self, scale=JITTER_SCALE, growth=JITTER_GROWTH,
                 max_escalations=JITTER_MAX_ESCALATIONS, eager=False):
        self.scale = scale
        self.growth = growth
        self.max_escalations = max_escalations
        self.eager = eager

    def shifts(self, A):
        m = A.shape[0]
        base = self.scale * np.trace(A) / m
        if not base > 0:
            base = self.scale

        if not self.eager:
            yield 0.0

        for k in range(self.max_escalations + 1):
            yield base * self.growth ** k

DEFAULT_JITTER = JitterPolicy()
EAGER_JITTER = JitterPolicy(eager=True)

class CholFactor:
    """Lower triangular factor L with L L^T = A + jitter_used * I"""

    def __init__(self, L, jitter_used=0.0):
        self._L = L
        self._jitter_used = jitter_used

    @property
    def L(self):
        return self._L

    @property
    def jitter_used(self):
        return self._jitter_used

    @property
    def size(self):
        return self._L.shape[0]

    def reconstruct(self):
        return self._L @ self._L.T

class CgTrace:
    """Per-iteration residual norms of a conjugate gradient run"""

    def __init__(self, initial_residual=0.0):
        self.initial_residual = initial_residual
        self.residuals = []
        self.converged = False

    @property
    def iterations(self):
        return len(self.residuals)

    def to_dict(self):
        return {
            "initial_residual": self.initial_residual,
            "residuals": list(self.residuals),
            "iterations": self.iterations,
            "converged": self.converged
        }

def check_symmetric(A, tolerance=SYMMETRY_TOLERANCE):
    """Validates that A is a square symmetric matrix and returns it as float64

    :param array_like A: matrix
    :param float tolerance: allowed ||A - A^T||_F / ||A||_F
    :return ndarray: A
    """

    A = np.asarray(A, dtype=np.float64)

    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise DimensionMismatchException("square m x m with m >= 1", A.shape, "matrix")

    norm = np.linalg.norm(A)
    asym = np.linalg.norm(A - A.T)
    if asym > tolerance * norm:
        raise AsymmetricMatrixException(asym / norm)

    return A

def cholesky(A, jitter_policy=DEFAULT_JITTER, name="matrix"):
    """Cholesky factorization with escalating diagonal jitter

    :param array_like A: symmetric m x m matrix
    :param JitterPolicy jitter_policy: shift schedule
    :param string name: matrix name used in the error message
    :return CholFactor: factor of A + jitter * I
    """

    A = check_symmetric(A)
    eye = np.eye(A.shape[0])
    jitter = 0.0

    for jitter in jitter_policy.shifts(A):
        shifted = A + jitter * eye if jitter else A

        try:
            L = scipy.linalg.cholesky(shifted, lower=True, check_finite=False)
        except (np.linalg.LinAlgError, ValueError):
            log.debug("Cholesky of %s failed with jitter %.3e", name, jitter)
            continue

        if np.all(np.isfinite(L)) and np.all(np.diag(L) > 0):
            if jitter:
                log.debug("Cholesky of %s succeeded with jitter %.3e", name, jitter)
            return CholFactor(L, jitter)

    raise FactorizationException(jitter, name)

def tri_solve(factor, B, side="lower"):
    """Triangular solve against a Cholesky factor

    lower:            L X = B
    upper:            L^T X = B, with L^T handled as an explicit upper factor
    lower_transposed: L^T X = B, through the transposed solve of the lower factor

    :param CholFactor factor: the factor
    :param array_like B: m x k right-hand sides (or an m-vector)
    :param string side: one of TRI_SIDES
    :return ndarray: solution with the shape of B
    """

    if side not in TRI_SIDES:
        raise InvalidParameterException("side", side, "must be one of {}".format(TRI_SIDES))

    L = factor.L if isinstance(factor, CholFactor) else np.asarray(factor, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    m = L.shape[0]

    if B.shape[0] != m:
        raise DimensionMismatchException(m, B.shape[0], "right-hand side rows")

    if B.ndim == 2 and B.shape[1] == 0:
        return np.empty((m, 0))

    zeros = np.flatnonzero(np.diag(L) == 0)
    if zeros.size:
        raise SingularMatrixException(int(zeros[0]))

    if side == "lower":
        return scipy.linalg.solve_triangular(L, B, lower=True, check_finite=False)

    if side == "upper":
        return scipy.linalg.solve_triangular(L.T, B, lower=False, check_finite=False)

    return scipy.linalg.solve_triangular(L, B, trans="T", lower=True, check_finite=False)

def sym_eig(A):
    """Eigendecomposition of a symmetric matrix

    :param array_like A: symmetric m x m matrix
    :return tuple: (eigenvalues ascending, orthonormal eigenvectors as columns)
    """

    A = check_symmetric(A)

    try:
        return scipy.linalg.eigh(A, check_finite=False)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise EigensolverException(str(e))

def cg(apply, b, t_max, tol=0.0, callback=None):
    """Conjugate gradient from the zero iterate

    Stops after t_max iterations or once ||r|| <= tol * ||b||. With tol = 0 the
    iteration count is honored literally unless the residual vanishes.

    :param callable apply: v -> A v for a symmetric positive semidefinite A
    :param array_like b: right-hand side
    :param int t_max: maximal number of iterations (>= 1)
    :param float tol: relative residual tolerance (>= 0)
    :param callable callback: called as callback(iteration, x) after each step
    :return tuple: (solution, CgTrace)
    """

    if t_max < 1:
        raise InvalidParameterException("t_max", t_max, "must be at least 1")

    if tol < 0:
        raise InvalidParameterException("tol", tol, "must be nonnegative")

    b = np.asarray(b, dtype=np.float64)
    x = np.zeros_like(b)
    r = b.copy()
    b_norm = np.linalg.norm(b)
    trace = CgTrace(b_norm)

    if not np.isfinite(b_norm):
        raise ConjugateGradientException(trace, "non-finite right-hand side")

    if b_norm == 0:
        trace.converged = True
        return x, trace

    p = r.copy()
    rs = r @ r

    for it in range(1, t_max + 1):
        Ap = apply(p)
        pAp = p @ Ap

        if not np.isfinite(pAp):
            raise ConjugateGradientException(trace, "non-finite curvature")

        if pAp <= 0:
            # the search direction lies in the null space
            log.debug("CG stopped at iteration %d: curvature %.3e", it, pAp)
            break

        alpha = rs / pAp
        x += alpha * p
        r -= alpha * Ap
        rs_new = r @ r
        res = np.sqrt(rs_new)
        trace.residuals.append(float(res))

        if not (np.isfinite(res) and np.all(np.isfinite(x))):
            raise ConjugateGradientException(trace, "non-finite iterate")

        if callback is not None:
            callback(it, x)

        if res <= tol * b_norm:
            trace.converged = True
            break

        p = r + (rs_new / rs) * p
        rs = rs_new

    return x, trace
