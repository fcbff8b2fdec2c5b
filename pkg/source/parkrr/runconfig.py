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

from parkrr.exceptions import InvalidConfigValueException
from parkrr.general import DATA_SOURCES, DEFAULTS, KERNEL_FAMILIES, METRICS, PARTITION_MODES, \
                           RUN_MODES, TASKS

_TRUE = ("1", "true", "yes", "on")
_FALSE = ("0", "false", "no", "off")

def _parse_bool(key, value):
    if isinstance(value, bool):
        return value

    text = str(value).strip().lower()
    if text in _TRUE:
        return True
    if text in _FALSE:
        return False

    raise InvalidConfigValueException(key, value, "expected a boolean")

def _parse_int(key, value):
    if isinstance(value, bool):
        raise InvalidConfigValueException(key, value, "expected an integer")

    try:
        if isinstance(value, float):
            if not value.is_integer():
                raise ValueError()
            return int(value)
        return int(str(value).strip())
    except ValueError:
        raise InvalidConfigValueException(key, value, "expected an integer")

def _parse_float(key, value):
    try:
        return float(value)
    except (TypeError, ValueError):
        raise InvalidConfigValueException(key, value, "expected a number")

def _parse_str(key, value):
    return "" if value is None else str(value)

def _parse_bandwidth(key, value):
    if str(value).strip().lower() == "median":
        return "median"

    return _parse_float(key, value)

def _positive(value):
    return None if value > 0 else "must be positive"

def _at_least(bound):
    return lambda value: None if value >= bound else "must be at least {}".format(bound)

def _nonnegative(value):
    return None if value >= 0 else "must be nonnegative"

def _one_of(choices):
    return lambda value: None if value in choices else "must be one of {}".format(
        ", ".join(choices))

def _bandwidth(value):
    return None if value == "median" or value > 0 else "must be positive or 'median'"

def _unit_open(value):
    return None if 0 < value < 1 else "must lie in (0, 1)"

def _fraction(value):
    return None if 0 <= value < 1 else "must lie in [0, 1)"

def _sparsity(value):
    return None if 0 < value <= 1 else "must lie in (0, 1]"

def _delimiter(value):
    return None if len(value) == 1 else "must be a single character"

# key -> (parser, validator)
SCHEMA = {
    "kernel.family": (_parse_str, _one_of(KERNEL_FAMILIES)),
    "kernel.bandwidth": (_parse_bandwidth, _bandwidth),
    "partition.q": (_parse_int, _at_least(1)),
    "partition.mode": (_parse_str, _one_of(PARTITION_MODES)),
    "partition.seed": (_parse_int, _nonnegative),
    "partition.path": (_parse_str, None),
    "solver.lam": (_parse_float, _positive),
    "solver.m": (_parse_int, _at_least(1)),
    "solver.t": (_parse_int, _at_least(1)),
    "solver.tol": (_parse_float, _nonnegative),
    "solver.block_rows": (_parse_int, _at_least(1)),
    "solver.seed": (_parse_int, _nonnegative),
    "solver.scaling": (_parse_bool, None),
    "solver.workers": (_parse_int, _at_least(1)),
    "solver.verify_preconditioner": (_parse_bool, None),
    "dnc.center_multiplier": (_parse_float, _positive),
    "run.mode": (_parse_str, _one_of(RUN_MODES)),
    "run.trials": (_parse_int, _at_least(1)),
    "run.metric": (_parse_str, _one_of(METRICS)),
    "run.workers": (_parse_int, _at_least(1)),
    "data.source": (_parse_str, _one_of(DATA_SOURCES)),
    "data.path": (_parse_str, None),
    "data.label_column": (_parse_int, None),
    "data.delimiter": (_parse_str, _delimiter),
    "data.header": (_parse_bool, None),
    "data.task": (_parse_str, _one_of(TASKS)),
    "data.test_fraction": (_parse_float, _fraction),
    "data.split_seed": (_parse_int, _nonnegative),
    "synth.n": (_parse_int, _at_least(1)),
    "synth.d": (_parse_int, _at_least(1)),
    "synth.clusters": (_parse_int, _at_least(1)),
    "synth.noise": (_parse_float, _nonnegative),
    "synth.separation": (_parse_float, _nonnegative),
    "synth.blob_scale": (_parse_float, _positive),
    "synth.sparsity": (_parse_float, _sparsity),
    "synth.seed": (_parse_int, _nonnegative),
    "synth.n_test": (_parse_int, _nonnegative),
    "synth.axis_aligned": (_parse_bool, None),
    "synth.leak": (_parse_float, _nonnegative),
    "diagnostics.enabled": (_parse_bool, None),
    "diagnostics.delta": (_parse_float, _unit_open),
    "output.report": (_parse_str, None),
    "output.csv": (_parse_str, None),
    "output.model": (_parse_str, None)
}

# seeds shifted by the trial number in repeated-trial mode
SEED_KEYS = ("partition.seed", "solver.seed", "synth.seed", "data.split_seed")

class RunConfig:
    """Fully resolved run configuration

    Values are resolved from the defaults, then configuration files, then
    command-line flags; every key is typed and validated.
    """

    def __init__(self, values=None):
        self._values = dict(DEFAULTS)

        if values:
            self.update(values)

    @classmethod
    def from_sources(cls, file_values=None, cli_values=None):
        """Defaults < configuration files < command-line flags

        :param dict file_values: merged key-value pairs of the configuration files
        :param dict cli_values: flag values, None entries are ignored
        :return RunConfig: the validated configuration
        """

        config = cls()
        config.update({k: v for k, v in (file_values or {}).items() if k in SCHEMA})
        config.update({k: v for k, v in (cli_values or {}).items() if v is not None})
        config.validate()

        return config

    def update(self, values):
        for key, value in values.items():
            if key not in SCHEMA:
                raise InvalidConfigValueException(key, value, "unknown configuration key")

            parser = SCHEMA[key][0]
            self._values[key] = parser(key, value)

    def override(self, values):
        """Returns a copy with some keys replaced"""

        config = RunConfig(self._values)
        config.update(values)

        return config

    def for_trial(self, trial):
        """Configuration of trial k: every seed shifted by k"""

        return self.override({key: self._values[key] + trial for key in SEED_KEYS})

    def validate(self):
        for key, (_, validator) in SCHEMA.items():
            if validator is None:
                continue

            reason = validator(self._values[key])
            if reason:
                raise InvalidConfigValueException(key, self._values[key], reason)

        if self._values["data.source"] in ("csv", "cache") and not self._values["data.path"]:
            raise InvalidConfigValueException("data.path", "",
                "required for data.source={}".format(self._values["data.source"]))

        return self

    def __getitem__(self, key):
        try:
            return self._values[key]
        except KeyError:
            raise InvalidConfigValueException(key, None, "unknown configuration key")

    def __contains__(self, key):
        return key in self._values

    def __eq__(self, other):
        return isinstance(other, RunConfig) and self._values == other._values

    def to_dict(self):
        return dict(self._values)
