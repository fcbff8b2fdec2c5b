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

import json
import numpy as np
import struct
from parkrr.estimator import DncModel, FalkonModel, KrrModel, ParkModel
from parkrr.exceptions import ArtifactFormatException, InvalidParameterException
from parkrr.general import MODEL_MAGIC
from parkrr.kernel import KernelSpec
from parkrr.localsolver import LocalModel, NystromSet
from parkrr.logmanager import log
from parkrr.partition import Partition

FORMAT_VERSION = 1

# header: MODEL_MAGIC, uint32 LE header length, UTF-8 JSON header,
# then the arrays listed in header["arrays"] as raw little-endian bytes
_LENGTH = struct.Struct("<I")

class _Writer:
    def __init__(self):
        self.descriptors = []
        self.chunks = []

    def add(self, name, array, dtype):
        array = np.ascontiguousarray(np.asarray(array).astype(dtype, copy=False))
        self.descriptors.append({"name": name, "dtype": dtype, "shape": list(array.shape)})
        self.chunks.append(array.tobytes())

class _Reader:
    def __init__(self, path, descriptors, payload):
        self._path = path
        self._arrays = {}
        offset = 0

        for desc in descriptors:
            dtype = np.dtype(desc["dtype"])
            count = int(np.prod(desc["shape"], dtype=np.int64))
            size = count * dtype.itemsize

            if offset + size > len(payload):
                raise ArtifactFormatException(path, "truncated array '{}'".format(desc["name"]))

            data = np.frombuffer(payload, dtype=dtype, count=count, offset=offset)
            self._arrays[desc["name"]] = data.reshape(desc["shape"]).copy()
            offset += size

        if offset != len(payload):
            raise ArtifactFormatException(path, "{} trailing bytes".format(len(payload) - offset))

    def __getitem__(self, name):
        try:
            return self._arrays[name]
        except KeyError:
            raise ArtifactFormatException(self._path, "missing array '{}'".format(name))

def _encode_local(writer, prefix, model):
    writer.add(prefix + ".centers", model.centers.points, "<f8")
    writer.add(prefix + ".alpha", model.alpha, "<f8")
    writer.add(prefix + ".positions", model.centers.positions, "<i8")
    writer.add(prefix + ".indices", model.centers.indices, "<i8")

    return {"lam": model.lam, "iterations": model.iterations,
            "clamped": bool(model.centers.clamped)}

def _decode_local(reader, prefix, header):
    centers = NystromSet(reader[prefix + ".positions"], reader[prefix + ".indices"],
                         reader[prefix + ".centers"], header["clamped"])

    return LocalModel(centers, reader[prefix + ".alpha"], header["lam"], header["iterations"])

# wall times are left out of the artifact
_TIME_KEYS = ("selection_time", "assignment_time", "train_time")

def _without_times(entries):
    return {key: value for key, value in entries.items() if key not in _TIME_KEYS}

def _encode(model, writer):
    header = {"kind": model.kind, "kernel": model.spec.to_dict()}

    if isinstance(model, ParkModel):
        header.update({
            "lam": model.lam, "m": model.m, "t": model.t,
            "partition": {"mode": model.partition.mode,
                          "stats": _without_times(model.partition.stats)},
            "cell_params": [_without_times(params) for params in model.cell_params],
            "cells": [_encode_local(writer, "cell{}".format(q), local)
                      for q, local in enumerate(model.models)]
        })
        writer.add("centroids", model.centroids, "<f8")
        writer.add("centroid_indices", model.partition.centroid_indices, "<i8")
        writer.add("assignment", model.partition.assignment, "<i8")
    elif isinstance(model, DncModel):
        header.update({
            "lam": model.lam, "m": model.m, "t": model.t, "version": model.version,
            "center_multiplier": model.center_multiplier,
            "cell_params": [_without_times(params) for params in model.cell_params],
            "cells": [_encode_local(writer, "cell{}".format(q), local)
                      for q, local in enumerate(model.models)]
        })
        for q, split in enumerate(model.splits):
            writer.add("split{}".format(q), split, "<i8")
    elif isinstance(model, FalkonModel):
        header.update({"lam": model.lam, "m": model.m, "t": model.t,
                       "model": _encode_local(writer, "model", model.model)})
    elif isinstance(model, KrrModel):
        header["lam"] = model.lam
        writer.add("points", model.X, "<f8")
        writer.add("alpha", model.alpha, "<f8")
    else:
        raise InvalidParameterException("model", type(model).__name__, "cannot be serialized")

    return header

def _decode(path, header, reader):
    spec = KernelSpec.from_dict(header["kernel"])
    kind = header["kind"]

    if kind == "park":
        partition = Partition(reader["centroid_indices"], reader["assignment"],
                              header["partition"]["mode"], header["partition"]["stats"])
        models = [_decode_local(reader, "cell{}".format(q), cell)
                  for q, cell in enumerate(header["cells"])]
        return ParkModel(spec, partition, reader["centroids"], models, header["lam"], header["m"],
                         header["t"], header["cell_params"])

    if kind == "dnc":
        models = [_decode_local(reader, "cell{}".format(q), cell)
                  for q, cell in enumerate(header["cells"])]
        splits = [reader["split{}".format(q)] for q in range(len(models))]
        return DncModel(spec, splits, models, header["lam"], header["m"], header["t"],
                        header["cell_params"], header["version"], header["center_multiplier"])

    if kind == "falkon":
        return FalkonModel(spec, _decode_local(reader, "model", header["model"]), header["lam"],
                           header["m"], header["t"])

    if kind == "krr":
        return KrrModel(spec, reader["points"], reader["alpha"], header["lam"])

    raise ArtifactFormatException(path, "unknown model kind '{}'".format(kind))

def save_model(model, path):
    """Writes a trained model to a PARK1 artifact

    :param object model: ParkModel, DncModel, FalkonModel or KrrModel
    :param string path: target file
    """

    writer = _Writer()
    header = _encode(model, writer)
    header["format_version"] = FORMAT_VERSION
    header["arrays"] = writer.descriptors
    raw = json.dumps(header).encode("utf-8")

    with open(path, "wb") as f:
        f.write(MODEL_MAGIC)
        f.write(_LENGTH.pack(len(raw)))
        f.write(raw)
        for chunk in writer.chunks:
            f.write(chunk)

    log.info("Saved %s model to %s", model.kind, path)

def load_model(path):
    """Reads a PARK1 artifact written by save_model

    :param string path: artifact file
    :return object: the model
    """

    with open(path, "rb") as f:
        data = f.read()

    if not data.startswith(MODEL_MAGIC):
        raise ArtifactFormatException(path, "bad magic (expected {!r})".format(MODEL_MAGIC))

    start = len(MODEL_MAGIC)
    if len(data) < start + _LENGTH.size:
        raise ArtifactFormatException(path, "truncated header")

    length = _LENGTH.unpack_from(data, start)[0]
    start += _LENGTH.size

    if len(data) < start + length:
        raise ArtifactFormatException(path, "truncated header")

    try:
        header = json.loads(data[start:start + length].decode("utf-8"))
    except ValueError as e:
        raise ArtifactFormatException(path, "unreadable header ({})".format(e))

    if header.get("format_version") != FORMAT_VERSION:
        raise ArtifactFormatException(path, "unsupported format version {}".format(
            header.get("format_version")))

    try:
        reader = _Reader(path, header["arrays"], data[start + length:])
        return _decode(path, header, reader)
    except KeyError as e:
        raise ArtifactFormatException(path, "missing header field {}".format(e))
