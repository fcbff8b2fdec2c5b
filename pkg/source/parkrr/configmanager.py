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

import os
import re
import shutil
from parkrr.exceptions import InvalidConfigTypeException, ConfigFilePermissionErrorException, \
                              ConfigFileNotCreatedException, ConfigFileAlreadyExistsException, \
                              ConfigFileCreationPermissionErrorException
from parkrr.general import HOME_DIR, TEMPLATE_PATH
from parkrr.logmanager import log

# dotted keys, e.g. "solver.lam = 0.001"; lines starting with "#" are comments
_search_pattern = re.compile(r"^\s*(?!#)(?P<key>[\w\.]+)\s*=\s*(?P<value>.*?)\s*$")

def get_prop(prop, config_type="", config_path=""):
    """Returns the raw value of a run configuration key

    Without a config type the global and the user configuration are layered.

    :param string prop: The requested key, e.g. solver.lam
    :param string config_type: global, user or own
    :param string config_path: path of the own configuration file
    :return string: The value or None
    """

    if config_type:
        paths = [get_config_path(config_type, config_path)]
    else:
        paths = get_default_paths()

    return parse_config(paths).get(prop)

def set_prop(prop, value, config_type="", config_path=""):
    """Writes a run configuration key into one configuration file

    :param string prop: The key
    :param string value: The raw value
    :param string config_type: global, user or own
    :param string config_path: path of the own configuration file
    """

    _write_value(get_config_path(config_type, config_path), prop, value)

def get_config_path(config_type, config_path=""):
    if config_type == "own":
        return config_path
    if config_type == "user":
        return get_user_config_path()
    if config_type == "global":
        return get_global_config_path()

    raise InvalidConfigTypeException()

def get_global_config_path():
    return "/etc/parkrr/parkrr.conf"

def get_user_config_path():
    return "{}/parkrr.conf".format(HOME_DIR)

def get_default_paths():
    """Returns the global and the user configuration files which exist, in this order

    :return list: paths
    """

    return [path for path in (get_global_config_path(), get_user_config_path())
            if os.path.exists(path)]

def load_layers(own_path=None):
    """Merges the global, the user and an own configuration file

    Later files override earlier ones.

    :param string own_path: path of an own configuration file or None
    :return dict: key-value pairs (values are strings)
    """

    paths = get_default_paths()

    if own_path:
        paths.append(own_path)

    return parse_config(paths)

def parse_config(paths):
    """Merges the key-value pairs of several configuration files

    :param list paths: configuration files, later ones win
    :return dict: raw string values by key
    """

    data = {}

    for path in paths:
        data.update(_read_pairs(path))
        log.debug("Read configuration file %s", path)

    return data

def _read_pairs(path):
    if not os.path.isfile(path):
        raise ConfigFileNotCreatedException(path)

    try:
        with open(path) as f:
            matches = [_search_pattern.search(line) for line in f]
    except PermissionError:
        raise ConfigFilePermissionErrorException(path)

    return {m.group("key"): m.group("value") for m in matches if m}

def _key_of(line):
    m = _search_pattern.search(line)
    return m.group("key") if m else None

def _write_value(path, prop, value):
    if not os.path.isfile(path):
        raise ConfigFileNotCreatedException(path)

    entry = "{}={}".format(prop, value)

    try:
        with open(path, "r+") as f:
            lines = f.read().splitlines()

            hits = [i for i, line in enumerate(lines) if _key_of(line) == prop]

            for i in hits:
                lines[i] = entry

            if not hits:
                lines.append(entry)

            f.seek(0)
            f.truncate()
            f.write("\n".join(lines))
    except PermissionError:
        raise ConfigFilePermissionErrorException(path)

def generate_config(path, force_overwrite=False):
    """Copies the documented configuration template

    :param string path: a directory (the file is called parkrr.conf) or a file name
    :param bool force_overwrite: overwrite an existing file
    """

    target = os.path.join(path, "parkrr.conf") if os.path.isdir(path) else path

    if os.path.exists(target) and not force_overwrite:
        raise ConfigFileAlreadyExistsException(target)

    try:
        shutil.copy(os.path.join(TEMPLATE_PATH, "parkrr.conf"), target)
    except PermissionError:
        raise ConfigFileCreationPermissionErrorException(path)
