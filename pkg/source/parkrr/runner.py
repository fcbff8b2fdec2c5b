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
from parkrr import dataset as datasets
from parkrr import metrics
from parkrr.diagnostics import diagnose, excess_risk
from parkrr.estimator import ParkModel, train
from parkrr.exceptions import ParkException
from parkrr.general import __version__
from parkrr.kernel import KernelSpec
from parkrr.logmanager import log
from parkrr.modelfile import save_model
from parkrr.report import write_csv, write_json

def load_dataset(config, spec=None):
    """Dataset named by the data.* and synth.* keys of a configuration

    :param RunConfig config: resolved configuration
    :param KernelSpec spec: kernel of a synthetic target function
    :return Dataset: the dataset, with a held out part when one is configured
    """

    source = config["data.source"]

    if source == "synth":
        return datasets.synth_fixed_design(
            config["synth.n"], config["synth.d"], config["synth.clusters"], config["synth.noise"],
            config["synth.seed"], spec or KernelSpec(), config["synth.separation"],
            config["synth.blob_scale"], config["synth.sparsity"], config["synth.n_test"],
            config["synth.axis_aligned"], config["synth.leak"])

    if source == "csv":
        data = datasets.load_csv(config["data.path"], config["data.label_column"],
                                 config["data.delimiter"], config["data.header"],
                                 config["data.task"])
    else:
        data = datasets.read_cache(config["data.path"])
        sidecar = truth_path(config["data.path"])
        if os.path.exists(sidecar):
            truth = datasets.read_truth(sidecar)
            data = datasets.Dataset(data.X, data.Y, truth, data.name, data.task)

    return datasets.split_holdout(data, config["data.test_fraction"], config["data.split_seed"])

def truth_path(path):
    return "{}.truth.json".format(path)

def resolve_kernel(config, X=None):
    """KernelSpec of a configuration, resolving the median bandwidth on X"""

    bandwidth = config["kernel.bandwidth"]

    if bandwidth == "median":
        if X is None:
            # synthetic targets are drawn before the median is known
            bandwidth = 1.0
        else:
            bandwidth = datasets.median_bandwidth(X, config["data.split_seed"])

    return KernelSpec(config["kernel.family"], bandwidth)

def _summary(values):
    values = np.asarray(values, dtype=np.float64)
    return {"mean": float(np.mean(values)), "std": float(np.std(values))}

def run_trial(config, trial=0, data=None):
    """Trains and evaluates the configured estimator once

    :param RunConfig config: configuration of this trial (seeds already shifted)
    :param int trial: trial number
    :param Dataset data: fixed dataset, drawn from the configuration when None
    :return tuple: (trial record, trained model)
    """

    if data is None:
        data = load_dataset(config, resolve_kernel(config))

    spec = resolve_kernel(config, data.X)
    mode = config["run.mode"]

    start = time.perf_counter()
    model = train(mode, data.X, data.Y, spec, config)
    fit_time = time.perf_counter() - start

    if data.holdout is not None:
        X_eval, Y_eval = data.holdout
        evaluated_on = "holdout"
    else:
        X_eval, Y_eval = data.X, data.Y
        evaluated_on = "train"

    start = time.perf_counter()
    predictions = model.predict(X_eval)
    predict_time = time.perf_counter() - start

    metric, error = metrics.compute(config["run.metric"], Y_eval, predictions, data.task)
    timings = dict(model.timings)
    timings["predict"] = predict_time
    timings["total"] = timings.get("init", 0.0) + timings.get("train", fit_time)

    record = {
        "trial": trial,
        "seeds": {key: config[key] for key in ("partition.seed", "solver.seed", "synth.seed",
                                               "data.split_seed")},
        "kernel": spec.to_dict(),
        "metric": metric,
        "error": error,
        "evaluated_on": evaluated_on,
        "timings": timings,
        "cells": getattr(model, "cell_params", None)
    }

    if data.truth is not None:
        record["excess_risk"] = excess_risk(model.predict(data.X), data.truth.values(data.X))

        if config["diagnostics.enabled"] and isinstance(model, ParkModel) \
                and config["solver.scaling"]:
            report = diagnose(model, data.truth, data.X, config["solver.lam"],
                              config["diagnostics.delta"])
            record["diagnostics"] = report.to_dict()

    log.info("Trial %d (%s): %s = %.6g, init %.3fs, train %.3fs, predict %.3fs", trial, mode,
        metric, error, timings.get("init", 0.0), timings.get("train", 0.0), predict_time)

    return record, model

def run(config, data=None):
    """Runs run.trials trials of the configured estimator and writes the configured outputs

    Trial k uses every seed shifted by k. On failure the report carries a
    structured error record, is written if output.report is set, and the error
    is raised again.

    :param RunConfig config: validated configuration
    :param Dataset data: fixed dataset shared by all trials, drawn per trial when None
    :return dict: the report
    """

    report = {
        "version": __version__,
        "config": config.to_dict(),
        "status": "ok"
    }

    try:
        trials = [config.for_trial(k) for k in range(config["run.trials"])]

        def execute(k):
            return run_trial(trials[k], k, data)

        workers = config["run.workers"]
        if workers > 1 and len(trials) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(execute, range(len(trials))))
        else:
            results = [execute(k) for k in range(len(trials))]

        records = [record for record, _ in results]
        report["trials"] = records
        report["summary"] = {
            "mode": config["run.mode"],
            "metric": records[0]["metric"],
            "trials": len(records),
            "error": _summary([r["error"] for r in records]),
            "init": _summary([r["timings"].get("init", 0.0) for r in records]),
            "train": _summary([r["timings"].get("train", 0.0) for r in records]),
            "predict": _summary([r["timings"]["predict"] for r in records]),
            "total": _summary([r["timings"]["total"] for r in records])
        }

        if "excess_risk" in records[0]:
            report["summary"]["excess_risk"] = _summary([r["excess_risk"] for r in records])

        if config["output.model"]:
            save_model(results[0][1], config["output.model"])
    except ParkException as e:
        log.error("Run failed: %s", e)
        report["status"] = "error"
        report["error"] = {
            "type": type(e).__name__,
            "message": str(e),
            "exit_code": e.exit_code
        }

        if config["output.report"]:
            write_json(report, config["output.report"])

        raise

    if config["output.report"]:
        write_json(report, config["output.report"])

    if config["output.csv"]:
        write_csv([report], config["output.csv"])

    return report
