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

from os import path

# specifies the current version of this program
__version__ = "1.0.0"

# source directory of this python project
SOURCE_DIR=path.dirname(path.realpath(__file__))

# home directory
HOME_DIR="{}/.parkrr".format(path.expanduser("~"))

# templates location
TEMPLATE_PATH="{}/templates".format(SOURCE_DIR)

# kernel families
KERNEL_FAMILIES=("gaussian", "laplacian", "linear")

# centroid selection strategies
PARTITION_MODES=("greedy", "uniform")

# estimators the harness can run
RUN_MODES=("park", "park-uni", "dnc-v1", "dnc-v2", "falkon-global", "krr-exact")

# error metrics (table column names)
METRICS=("auto", "mse", "rmse", "c-err", "1-auc")

# dataset tasks
TASKS=("regression", "binary")

# dataset sources
DATA_SOURCES=("synth", "csv", "cache")

# first jitter is JITTER_SCALE * trace / m, then multiplied by JITTER_GROWTH
JITTER_SCALE=1e-12
JITTER_GROWTH=10.0
JITTER_MAX_ESCALATIONS=10
# exact solutions shifted by more than JITTER_WARN_SCALE * trace / m are reported
JITTER_WARN_SCALE=1e-8

# relative asymmetry tolerated by the dense factorizations
SYMMETRY_TOLERANCE=1e-10

# greedy selection stops when every residual is below this fraction of kappa^2
GREEDY_RESIDUAL_FLOOR=1e-12

# eigenvalues below this fraction of the trace are null directions
PINV_THRESHOLD=1e-10

# rows of K_nm held in memory at once
DEFAULT_BLOCK_ROWS=4096

# preconditioners up to this size are probed at build time
PROBE_MAX_CENTERS=200
PROBE_TOLERANCE=1e-6

# preconditioners larger than this are never materialized
DENSE_PRECONDITIONER_LIMIT=512

# relative slack of the risk decomposition identity
RISK_IDENTITY_TOLERANCE=1e-12

# median heuristic subsample
MEDIAN_HEURISTIC_POINTS=1000

# binary artifacts
MODEL_MAGIC=b"PARK1"
DATASET_MAGIC=b"PKDS1"

# defaults of every run configuration key
DEFAULTS={
    "kernel.family": "gaussian",
    "kernel.bandwidth": 1.0,
    "partition.q": 4,
    "partition.mode": "greedy",
    "partition.seed": 0,
    "partition.path": "",
    "solver.lam": 1e-3,
    "solver.m": 200,
    "solver.t": 20,
    "solver.tol": 0.0,
    "solver.block_rows": DEFAULT_BLOCK_ROWS,
    "solver.seed": 0,
    "solver.scaling": True,
    "solver.workers": 1,
    "solver.verify_preconditioner": True,
    "dnc.center_multiplier": 3.0,
    "run.mode": "park",
    "run.trials": 1,
    "run.metric": "auto",
    "run.workers": 1,
    "data.source": "synth",
    "data.path": "",
    "data.label_column": -1,
    "data.delimiter": ",",
    "data.header": False,
    "data.task": "regression",
    "data.test_fraction": 0.0,
    "data.split_seed": 0,
    "synth.n": 1000,
    "synth.d": 5,
    "synth.clusters": 4,
    "synth.noise": 0.1,
    "synth.separation": 5.0,
    "synth.blob_scale": 1.0,
    "synth.sparsity": 0.05,
    "synth.seed": 0,
    "synth.n_test": 0,
    "synth.axis_aligned": False,
    "synth.leak": 0.0,
    "diagnostics.enabled": True,
    "diagnostics.delta": 0.05,
    "output.report": "",
    "output.csv": "",
    "output.model": ""
}
