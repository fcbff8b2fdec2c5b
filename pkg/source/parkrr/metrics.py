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
from sklearn.metrics import roc_auc_score

def _pair(y_true, y_pred):
    y_true = np.asarray(y_true, dtype=np.float64).ravel()
    y_pred = np.asarray(y_pred, dtype=np.float64).ravel()

    if y_true.shape != y_pred.shape:
        raise DimensionMismatchException(y_true.shape[0], y_pred.shape[0], "predictions")

    if y_true.size == 0:
        raise InvalidParameterException("predictions", [], "needs at least one value")

    return y_true, y_pred

def mse(y_true, y_pred):
    y_true, y_pred = _pair(y_true, y_pred)
    return float(np.mean((y_true - y_pred) ** 2))

def rmse(y_true, y_pred):
    return float(np.sqrt(mse(y_true, y_pred)))

def classify(y_pred):
    """Sign thresholding of ±1 regression outputs; 0 maps to +1"""

    return np.where(np.asarray(y_pred, dtype=np.float64) >= 0, 1.0, -1.0)

def c_err(y_true, y_pred):
    y_true, y_pred = _pair(y_true, y_pred)
    return float(np.mean(classify(y_pred) != np.where(y_true > 0, 1.0, -1.0)))

def one_minus_auc(y_true, y_pred):
    y_true, y_pred = _pair(y_true, y_pred)
    labels = (y_true > 0).astype(int)

    if labels.min() == labels.max():
        raise InvalidParameterException("labels", "single class", "AUC needs both classes")

    return float(1.0 - roc_auc_score(labels, y_pred))

_METRICS = {
    "mse": mse,
    "rmse": rmse,
    "c-err": c_err,
    "1-auc": one_minus_auc
}

def resolve(metric, task):
    """Maps auto to mse for regression and c-err for binary tasks"""

    if metric == "auto":
        return "c-err" if task == "binary" else "mse"

    if metric not in _METRICS:
        raise InvalidParameterException("run.metric", metric, "unknown metric")

    return metric

def compute(metric, y_true, y_pred, task="regression"):
    """Error of the predictions under the named metric

    :param string metric: auto, mse, rmse, c-err or 1-auc
    :param array_like y_true: targets
    :param array_like y_pred: predictions
    :param string task: regression or binary
    :return tuple: (resolved metric name, value)
    """

    name = resolve(metric, task)
    return name, _METRICS[name](y_true, y_pred)
