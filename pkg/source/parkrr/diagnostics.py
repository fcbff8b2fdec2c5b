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
from itertools import combinations
from parkrr.estimator import ParkModel
from parkrr.exceptions import DimensionMismatchException, InconsistentInputsException, \
                              InvalidParameterException
from parkrr.general import PINV_THRESHOLD, RISK_IDENTITY_TOLERANCE
from parkrr.kernel import KernelSpec, as_points, gram, kappa_sq
from parkrr.localsolver import local_predict_batch
from parkrr.logmanager import log
from parkrr.numerics import sym_eig

# relative slack granted to the deterministic inequalities
BOUND_TOLERANCE = 1e-9

class GroundTruth:
    """Target function f* = sum_j w_j K(anchor_j, .) with noise level sigma"""

    def __init__(self, anchors, w, spec, sigma=0.0):
        self._anchors = as_points(anchors, "anchors")
        self._w = np.asarray(w, dtype=np.float64)
        self._spec = spec
        self._sigma = float(sigma)

        if self._w.shape != (self._anchors.shape[0],):
            raise DimensionMismatchException(self._anchors.shape[0], self._w.shape,
                                             "ground truth coefficients")

    @property
    def anchors(self):
        return self._anchors

    @property
    def w(self):
        return self._w

    @property
    def spec(self):
        return self._spec

    @property
    def sigma(self):
        return self._sigma

    def values(self, X):
        """f*(x) for every row of X"""

        return gram(self._spec, as_points(X), self._anchors) @ self._w

    @property
    def norm_sq(self):
        """||f*||^2 = w^T K w"""

        w = self._w
        return max(float(w @ (gram(self._spec, self._anchors, self._anchors) @ w)), 0.0)

    def to_dict(self):
        return {
            "anchors": self._anchors.tolist(),
            "w": self._w.tolist(),
            "kernel": self._spec.to_dict(),
            "sigma": self._sigma
        }

    @classmethod
    def from_dict(cls, data):
        return cls(data["anchors"], data["w"], KernelSpec.from_dict(data["kernel"]),
                   data.get("sigma", 0.0))

def excess_risk(predictions, truth):
    """(1 / n) sum_i (prediction_i - truth_i)^2

    :param array_like predictions: n predictions
    :param array_like truth: n values of the target function
    :return float: the excess risk
    """

    predictions = np.asarray(predictions, dtype=np.float64).ravel()
    truth = np.asarray(truth, dtype=np.float64).ravel()

    if predictions.shape != truth.shape:
        raise DimensionMismatchException(truth.shape[0], predictions.shape[0], "predictions")

    if predictions.size == 0:
        raise InvalidParameterException("predictions", [], "needs at least one value")

    diff = predictions - truth
    return float(np.mean(diff * diff))

class RiskDecomposition:
    """Global excess risk and its per-cell parts R = sum_q rho_q R_q"""

    def __init__(self, total, cell_risks, fractions):
        self.total = total
        self.cell_risks = list(cell_risks)
        self.fractions = list(fractions)
        self.weighted_sum = float(np.dot(self.cell_risks, self.fractions))
        self.gap = abs(self.total - self.weighted_sum)

    @property
    def holds(self):
        return self.gap <= RISK_IDENTITY_TOLERANCE * max(self.total, self.weighted_sum) \
            or self.gap == 0.0

def risk_decomposition(model, truth, X):
    """Per-cell excess risks of a partitioned model on its training design

    :param ParkModel model: trained model
    :param GroundTruth truth: target function
    :param ndarray X: the training points the model was fit on
    :return RiskDecomposition: total and per-cell risks
    """

    X = as_points(X)
    partition = model.partition

    if partition.n != X.shape[0]:
        raise InconsistentInputsException("partition covers {} points, design has {}".format(
            partition.n, X.shape[0]))

    fstar = truth.values(X)
    total = excess_risk(model.predict(X), fstar)

    cell_risks = []
    for q, cell in enumerate(partition.cells):
        local = local_predict_batch(model.models[q], model.spec, X[cell])
        cell_risks.append(excess_risk(local, fstar[cell]))

    result = RiskDecomposition(total, cell_risks, partition.cell_fractions)

    if not result.holds:
        log.warning("Risk decomposition gap %.3e (total %.6e): routing differs from the "
                    "training assignment", result.gap, total)

    return result

def _spectrum(K, scale):
    evals, evecs = sym_eig(K / scale)
    return np.maximum(evals, 0.0), evecs

def effective_dimension(K, lam, n=None):
    """sum_i s_i / (s_i + lam) over the eigenvalues s_i of K / n

    :param ndarray K: n x n Gram matrix
    :param float lam: regularization
    :param int n: normalization, defaults to the size of K
    :return float: N(lam)
    """

    if not lam > 0:
        raise InvalidParameterException("lam", lam, "must be positive")

    n = np.asarray(K).shape[0] if n is None else n
    evals, _ = _spectrum(K, float(n))

    return float(np.sum(evals / (evals + lam)))

def _cell_dimensions(K, lam_q):
    """(N_q, N_inf_q, largest eigenvalue) of one cell Gram matrix"""

    n_q = K.shape[0]
    evals, evecs = _spectrum(K, float(n_q))
    ratio = evals / (evals + lam_q)
    leverage = (evecs ** 2) @ ratio

    return float(np.sum(ratio)), float(n_q * np.max(leverage)), float(evals[-1])

def local_effective_dimensions(X, partition, spec, lams):
    """Local effective dimensions N_q(lam_q) and N_inf,q(lam_q) of every cell

    N_inf,q = max_i n_q [(K_q / n_q)(K_q / n_q + lam_q I)^-1]_ii, the largest
    <phi(x), (T_q + lam_q)^-1 phi(x)> over the cell's points.

    :param ndarray X: n x d training points
    :param Partition partition: the partition
    :param KernelSpec spec: the kernel
    :param list lams: lam_q per cell
    :return list: (N_q, N_inf_q) per cell
    """

    X = as_points(X)

    if len(lams) != partition.num_cells:
        raise InconsistentInputsException("{} regularizations for {} cells".format(
            len(lams), partition.num_cells))

    out = []
    for cell, lam_q in zip(partition.cells, lams):
        if not lam_q > 0:
            raise InvalidParameterException("lam_q", lam_q, "must be positive")

        Xq = X[cell]
        N_q, N_inf, _ = _cell_dimensions(gram(spec, Xq, Xq), lam_q)
        out.append((N_q, N_inf))

    return out

def _pinv_parts(K):
    """Orthonormal range basis V and eigenvalues s of K above the null threshold"""

    evals, evecs = sym_eig(K)
    trace = float(np.sum(np.maximum(evals, 0.0)))
    keep = evals > PINV_THRESHOLD * trace

    return evecs[:, keep], evals[keep]

def _whitener(K):
    V, s = _pinv_parts(K)
    return V / np.sqrt(s)

def principal_angles(partition, X, spec):
    """Cosines of the first principal angle between every pair of local feature spans

    cos(H_q, H_k) is the largest singular value of W_q^T K_qk W_k, with
    W = V s^(-1/2) built from the eigenpairs of the cell Gram above the null
    threshold.

    :param Partition partition: the partition, at least two cells
    :param ndarray X: n x d training points
    :param KernelSpec spec: the kernel
    :return tuple: ({(q, k): cosine} for q < k, the largest cosine)
    """

    X = as_points(X)

    if partition.num_cells < 2:
        raise InvalidParameterException("partition", partition.num_cells,
                                        "principal angles need at least two cells")

    whiteners = {}
    for q, cell in enumerate(partition.cells):
        W = _whitener(gram(spec, X[cell], X[cell]))
        if W.shape[1] == 0:
            log.warning("Cell %d spans no direction in feature space, skipped", q)
            continue
        whiteners[q] = W

    cosines = {}
    for q, k in combinations(sorted(whiteners), 2):
        cross = whiteners[q].T @ gram(spec, X[partition.cells[q]], X[partition.cells[k]]) \
            @ whiteners[k]
        top = float(np.linalg.svd(cross, compute_uv=False)[0]) if cross.size else 0.0
        cosines[(q, k)] = min(max(top, 0.0), 1.0)

    cos_theta = max(cosines.values()) if cosines else 0.0

    return cosines, cos_theta

def projection_norms(truth, partition, X, spec):
    """Squared norms of the projections of f* onto every local feature span

    :param GroundTruth truth: target function
    :param Partition partition: the partition
    :param ndarray X: n x d training points
    :param KernelSpec spec: the kernel
    :return tuple: (||P_q f*||^2 per cell, ||f*||^2)
    """

    X = as_points(X)
    v = truth.values(X)
    norms = []

    for cell in partition.cells:
        V, s = _pinv_parts(gram(spec, X[cell], X[cell]))
        coords = V.T @ v[cell]
        norms.append(float(np.sum(coords ** 2 / s)))

    return norms, truth.norm_sq

def iteration_lower_bound(sigma, lam_q, proj_norm_sq=None, kappa_sq=1.0, delta=0.05,
                          form="theorem"):
    """Minimal number of CG iterations of one cell, never below 0

    theorem: 2 log(4 sigma^2 / sqrt(||P_q f*||^2 lam_q)), None when ||P_q f*|| = 0
    proof:   2 log(6 sigma kappa log(1 / delta) / sqrt(lam_q))
    """

    if form == "theorem":
        if not proj_norm_sq:
            return None
        ratio = 4.0 * sigma ** 2 / np.sqrt(proj_norm_sq * lam_q)
    elif form == "proof":
        ratio = 6.0 * sigma * np.sqrt(kappa_sq) * np.log(1.0 / delta) / np.sqrt(lam_q)
    else:
        raise InvalidParameterException("form", form, "must be theorem or proof")

    # an iteration count
    if ratio <= 1.0:
        return 0.0

    return float(2.0 * np.log(ratio))

def center_lower_bound(n_inf, lam_q, kappa_sq=1.0, delta=0.05):
    """5 (1 + 14 N_inf,q) log(8 kappa^2 / (lam_q delta))"""

    return float(5.0 * (1.0 + 14.0 * n_inf) * np.log(8.0 * kappa_sq / (lam_q * delta)))

class TheoryQuantities:
    """Noise independent quantities of one partitioned design

    Computed once per (design, partition, lam) so that repeated noise draws only
    need the risk.
    """

    def __init__(self, n, lam, kappa_sq, effective_dim, cell_sizes, cell_lams, cell_dims,
                 cell_inf_dims, cell_top_eigenvalues, pair_cosines, cos_theta, proj_norms,
                 f_norm_sq):
        self.n = n
        self.lam = lam
        self.kappa_sq = kappa_sq
        self.effective_dim = effective_dim
        self.cell_sizes = list(cell_sizes)
        self.cell_lams = list(cell_lams)
        self.cell_dims = list(cell_dims)
        self.cell_inf_dims = list(cell_inf_dims)
        self.cell_top_eigenvalues = list(cell_top_eigenvalues)
        self.pair_cosines = pair_cosines
        self.cos_theta = cos_theta
        self.proj_norms = list(proj_norms)
        self.f_norm_sq = f_norm_sq

    @property
    def num_cells(self):
        return len(self.cell_sizes)

    @property
    def fractions(self):
        return [n_q / float(self.n) for n_q in self.cell_sizes]

def theory_quantities(X, partition, spec, lam, truth=None):
    """Effective dimensions, principal angles and projection norms at lam_q = lam / rho_q

    :param ndarray X: n x d training points
    :param Partition partition: the partition
    :param KernelSpec spec: the kernel
    :param float lam: global regularization
    :param GroundTruth truth: target function, projection norms are skipped without it
    :return TheoryQuantities: the quantities
    """

    X = as_points(X)

    if not lam > 0:
        raise InvalidParameterException("lam", lam, "must be positive")

    n = X.shape[0]
    sizes = partition.cell_sizes.tolist()
    lams = [lam * n / n_q for n_q in sizes]

    dims, inf_dims, tops = [], [], []
    for cell, lam_q in zip(partition.cells, lams):
        N_q, N_inf, top = _cell_dimensions(gram(spec, X[cell], X[cell]), lam_q)
        dims.append(N_q)
        inf_dims.append(N_inf)
        tops.append(top)

    if partition.num_cells > 1:
        cosines, cos_theta = principal_angles(partition, X, spec)
    else:
        cosines, cos_theta = {}, 0.0

    if truth is not None:
        proj, f_norm_sq = projection_norms(truth, partition, X, spec)
    else:
        proj, f_norm_sq = [], None

    return TheoryQuantities(n, lam, kappa_sq(spec, X), effective_dimension(gram(spec, X, X), lam),
                            sizes, lams, dims, inf_dims, tops, cosines, cos_theta, proj, f_norm_sq)

class BoundVerdict:
    """One inequality lhs <= rhs with its slack rhs - lhs"""

    def __init__(self, name, lhs, rhs, deterministic, condition=False, tolerance=0.0):
        self.name = name
        self.lhs = float(lhs)
        self.rhs = float(rhs)
        self.deterministic = deterministic
        self.condition = condition
        self.passed = bool(self.lhs <= self.rhs + tolerance * abs(self.rhs))

    @property
    def slack(self):
        return self.rhs - self.lhs

    def to_dict(self):
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "passed": self.passed,
            "deterministic": self.deterministic,
            "condition": self.condition
        }

def _check_consistent(model, partition, quantities):
    if not isinstance(model, ParkModel):
        raise InconsistentInputsException("bound checks need a partitioned model")

    if not np.array_equal(model.partition.assignment, partition.assignment):
        raise InconsistentInputsException("the model was trained on a different partition")

    if quantities.num_cells != model.num_cells:
        raise InconsistentInputsException("quantities describe {} cells, the model has {}".format(
            quantities.num_cells, model.num_cells))

    for q, params in enumerate(model.cell_params):
        expected = quantities.cell_lams[q]
        if abs(params["lam_q"] - expected) > 1e-12 * expected:
            raise InconsistentInputsException(
                "cell {} uses lam_q = {} but the bounds need lam / rho_q = {}".format(
                    q, params["lam_q"], expected))

def check_bounds(model, truth, partition, lam, delta, X, quantities=None, risk=None):
    """Evaluates both sides of the bias, variance and excess risk inequalities

    The bias and variance inequalities hold deterministically; the excess risk
    bounds hold with probability at least 1 - 4 delta and come with the side
    conditions on lam_q, m_q and t_q reported as separate verdicts.

    :param ParkModel model: trained model
    :param GroundTruth truth: target function and noise level
    :param Partition partition: the partition the model was trained on
    :param float lam: global regularization
    :param float delta: confidence parameter in (0, 1)
    :param ndarray X: training points
    :param TheoryQuantities quantities: precomputed quantities of the design
    :param float risk: precomputed excess risk of the model
    :return list: BoundVerdict values
    """

    if not 0 < delta < 1:
        raise InvalidParameterException("diagnostics.delta", delta, "must lie in (0, 1)")

    X = as_points(X)
    if quantities is None:
        quantities = theory_quantities(X, partition, model.spec, lam, truth)
    elif quantities.f_norm_sq is None:
        raise InconsistentInputsException("quantities were computed without a ground truth")

    _check_consistent(model, partition, quantities)

    if risk is None:
        risk = excess_risk(model.predict(X), truth.values(X))

    Q = quantities.num_cells
    n = quantities.n
    k2 = quantities.kappa_sq
    cos = quantities.cos_theta
    sigma = truth.sigma
    log_delta = np.log(1.0 / delta)
    f_norm_sq = quantities.f_norm_sq
    proj_sum = float(np.sum(quantities.proj_norms))
    dim_sum = float(np.sum(quantities.cell_dims))
    N = quantities.effective_dim

    verdicts = [
        BoundVerdict("bias.projections", proj_sum, (1.0 + Q ** 2 * cos) * f_norm_sq, True,
                     tolerance=BOUND_TOLERANCE),
        BoundVerdict("variance.effective_dimension", dim_sum, (1.0 + k2 * cos ** 2 / lam) * N,
                     True, tolerance=BOUND_TOLERANCE)
    ]

    bias = 16.0 * sum(p * l_q * r_q for p, l_q, r_q in
                      zip(quantities.proj_norms, quantities.cell_lams, quantities.fractions))
    variance = sigma ** 2 * sum(N_q + np.sqrt(N_q * log_delta) + 2.0 * log_delta
                                for N_q in quantities.cell_dims) / n
    verdicts.append(BoundVerdict("risk.local", risk, bias + variance, False))

    for q, params in enumerate(model.cell_params):
        lam_q = quantities.cell_lams[q]
        verdicts.append(BoundVerdict("condition.lam_q[{}]".format(q), lam_q, k2, False, True))
        verdicts.append(BoundVerdict("condition.m_q[{}]".format(q),
            center_lower_bound(quantities.cell_inf_dims[q], lam_q, k2, delta), params["m_q"],
            False, True))
        t_bound = iteration_lower_bound(sigma, lam_q, quantities.proj_norms[q], k2, delta)
        if t_bound is None:
            log.info("Cell %d carries no part of the target, no iteration bound", q)
        else:
            verdicts.append(BoundVerdict("condition.t_q[{}]".format(q), t_bound, params["t_q"],
                False, True))
        verdicts.append(BoundVerdict("condition.t_q_proof[{}]".format(q),
            iteration_lower_bound(sigma, lam_q, None, k2, delta, "proof"), params["t_q"],
            False, True))

    global_rhs = 16.0 * (1.0 + Q ** 2 * cos) * f_norm_sq * lam \
        + 4.0 * sigma ** 2 / n * (1.0 + k2 * cos ** 2 / lam) * N * log_delta
    verdicts.append(BoundVerdict("risk.global", risk, global_rhs, False))
    verdicts.append(BoundVerdict("condition.lam", lam, min(quantities.fractions) * k2, False, True))

    for verdict in verdicts:
        if verdict.deterministic and not verdict.passed:
            log.error("Deterministic bound %s violated: %.6e > %.6e", verdict.name, verdict.lhs,
                verdict.rhs)

    return verdicts

class DiagnosticsReport:
    """Theory side report of one trained partitioned model"""

    def __init__(self, risk, decomposition, quantities, verdicts, delta, sigma):
        self.risk = risk
        self.decomposition = decomposition
        self.quantities = quantities
        self.verdicts = verdicts
        self.delta = delta
        self.sigma = sigma

    @property
    def deterministic_passed(self):
        return all(v.passed for v in self.verdicts if v.deterministic)

    def cell_rows(self):
        qty = self.quantities
        rows = []

        for q in range(qty.num_cells):
            lam_q = qty.cell_lams[q]
            proj = qty.proj_norms[q] if qty.proj_norms else None
            rows.append({
                "cell": q,
                "n_q": qty.cell_sizes[q],
                "rho_q": qty.fractions[q],
                "risk_q": self.decomposition.cell_risks[q] if self.decomposition else None,
                "lam_q": lam_q,
                "effective_dim": qty.cell_dims[q],
                "effective_dim_inf": qty.cell_inf_dims[q],
                "effective_dim_inf_spectral_bound": qty.cell_top_eigenvalues[q] / lam_q,
                "proj_norm_sq": proj,
                "m_lower_bound": center_lower_bound(qty.cell_inf_dims[q], lam_q, qty.kappa_sq,
                                                    self.delta),
                "t_lower_bound": iteration_lower_bound(self.sigma, lam_q, proj, qty.kappa_sq,
                                                       self.delta, "theorem"),
                "t_lower_bound_proof": iteration_lower_bound(self.sigma, lam_q, None, qty.kappa_sq,
                                                             self.delta, "proof")
            })

        return rows

    def to_dict(self):
        qty = self.quantities
        return {
            "risk": self.risk,
            "risk_identity_gap": self.decomposition.gap if self.decomposition else None,
            "lam": qty.lam,
            "delta": self.delta,
            "sigma": self.sigma,
            "kappa_sq": qty.kappa_sq,
            "effective_dim": qty.effective_dim,
            "cos_theta": qty.cos_theta,
            "pair_cosines": [{"q": q, "k": k, "cos": c} for (q, k), c in
                             sorted(qty.pair_cosines.items())],
            "f_norm_sq": qty.f_norm_sq,
            "proj_norm_sum": float(np.sum(qty.proj_norms)) if qty.proj_norms else None,
            "cells": self.cell_rows(),
            "verdicts": [v.to_dict() for v in self.verdicts]
        }

    def to_json(self, path):
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2, allow_nan=False)

    def to_csv(self, path):
        write_cell_csv(self.cell_rows(), path)

def write_cell_csv(rows, path):
    """Writes the per-cell rows of a diagnostics report, one CSV row per cell

    :param list rows: DiagnosticsReport.cell_rows() or the "cells" of its dictionary
    :param string path: output file
    """

    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)

def diagnose(model, truth, X, lam=None, delta=0.05, quantities=None):
    """Risk decomposition, theory quantities and bound verdicts of a partitioned model

    :param ParkModel model: trained model
    :param GroundTruth truth: target function and noise level
    :param ndarray X: training points
    :param float lam: global regularization, defaults to the model's
    :param float delta: confidence parameter
    :return DiagnosticsReport: the report
    """

    X = as_points(X)
    lam = model.lam if lam is None else lam

    if quantities is None:
        quantities = theory_quantities(X, model.partition, model.spec, lam, truth)

    decomposition = risk_decomposition(model, truth, X)
    verdicts = check_bounds(model, truth, model.partition, lam, delta, X, quantities,
                            decomposition.total)

    log.info("Diagnostics: risk %.4e, N(lam) %.3f, cos(theta) %.4f, %d/%d verdicts passed",
        decomposition.total, quantities.effective_dim, quantities.cos_theta,
        sum(v.passed for v in verdicts), len(verdicts))

    return DiagnosticsReport(decomposition.total, decomposition, quantities, verdicts, delta,
                             truth.sigma)
