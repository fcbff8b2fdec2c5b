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

import sys
from parkrr.exitcodes import E_INVALID_CLI, E_NO_IMPLEMENTATION_FOUND, E_CONFIG_PROP_NOT_FOUND, \
                             E_CONFIG_FILE_PERMISSION_DENIED, E_CONFIG_FILE_NOT_CREATED, \
                             E_INVALID_INPUT, E_NUMERICAL_ERROR, E_CONFIG_FILE_ALREADY_CREATED
from parkrr.logmanager import log

class ParkException(Exception):
    exit_code = E_INVALID_INPUT

    def __init__(self, message=""):
        self.message = message

    def __str__(self):
        return self.message

#
# command line and configuration files
#

class InvalidCommandLineException(ParkException):
    def __init__(self, message=""):
        if len(message):
            log.error(message)

        sys.exit(E_INVALID_CLI)

class InvalidActionException(ParkException):
    def __init__(self, action):
        log.error("No implementation for '%s' found.", action)
        sys.exit(E_NO_IMPLEMENTATION_FOUND)

class InvalidConfigTypeException(ParkException):
    pass

class ConfigPropertyNotFoundException(ParkException):
    def __init__(self):
        sys.exit(E_CONFIG_PROP_NOT_FOUND)

class ConfigFilePermissionErrorException(ParkException):
    def __init__(self, file_name):
        log.error("Could not access config file '%s'! Please check the permissions.", file_name)
        sys.exit(E_CONFIG_FILE_PERMISSION_DENIED)

class ConfigFileNotCreatedException(ParkException):
    def __init__(self, file_name):
        log.error("Config file '%s' does not exist. Please generate it by using: 'parkrr " \
              "config --generate --path %s'", file_name, file_name)
        sys.exit(E_CONFIG_FILE_NOT_CREATED)

class ConfigFileCreationPermissionErrorException(ParkException):
    exit_code = E_CONFIG_FILE_PERMISSION_DENIED

    def __init__(self, path):
        self.path = path
        self.message = "Could not create config file at '{}'.".format(path)

class ConfigFileAlreadyExistsException(ParkException):
    exit_code = E_CONFIG_FILE_ALREADY_CREATED

    def __init__(self, path):
        self.path = path
        self.message = "Config file '{}' already exists.".format(path)

#
# input errors (exit code 2)
#

class InputException(ParkException):
    exit_code = E_INVALID_INPUT

class InvalidConfigValueException(InputException):
    def __init__(self, key, value, reason):
        self.key = key
        self.value = value
        self.reason = reason
        self.message = "Invalid value '{}' for '{}': {}".format(value, key, reason)

class InvalidParameterException(InputException):
    def __init__(self, name, value, reason):
        self.name = name
        self.value = value
        self.reason = reason
        self.message = "Invalid parameter {}={}: {}".format(name, value, reason)

class DimensionMismatchException(InputException):
    def __init__(self, expected, actual, what="points"):
        self.expected = expected
        self.actual = actual
        self.message = "Dimension mismatch for {}: expected {}, got {}.".format(
            what, expected, actual
        )

class AsymmetricMatrixException(InputException):
    def __init__(self, asymmetry):
        self.asymmetry = asymmetry
        self.message = "Matrix is not symmetric (relative asymmetry {:.3e}).".format(asymmetry)

class EmptyCellException(InputException):
    def __init__(self, cell=None):
        self.cell = cell
        self.message = "Cell {} has no points.".format(cell)

class InconsistentInputsException(InputException):
    def __init__(self, message):
        self.message = message

class DatasetParseException(InputException):
    def __init__(self, path, line, reason):
        self.path = path
        self.line = line
        self.reason = reason
        self.message = "{}:{}: {}".format(path, line, reason)

class ArtifactFormatException(InputException):
    def __init__(self, path, reason):
        self.path = path
        self.reason = reason
        self.message = "Invalid artifact '{}': {}".format(path, reason)

#
# numerical errors (exit code 3)
#

class NumericalException(ParkException):
    exit_code = E_NUMERICAL_ERROR

class FactorizationException(NumericalException):
    def __init__(self, jitter, name="matrix"):
        self.jitter = jitter
        self.name = name
        self.message = "Cholesky factorization of {} failed (last jitter tried: {:.3e}).".format(
            name, jitter
        )

class SingularMatrixException(NumericalException):
    def __init__(self, index):
        self.index = index
        self.message = "Triangular factor has a zero diagonal entry at position {}.".format(index)

class EigensolverException(NumericalException):
    def __init__(self, reason):
        self.reason = reason
        self.message = "Symmetric eigensolver did not converge: {}".format(reason)

class ConjugateGradientException(NumericalException):
    def __init__(self, trace, reason):
        self.trace = trace
        self.reason = reason
        self.message = "Conjugate gradient failed after {} iterations: {}".format(
            trace.iterations, reason
        )

class DegenerateRankException(NumericalException):
    def __init__(self, selectable, requested):
        self.selectable = selectable
        self.requested = requested
        self.message = "Only {} of {} centroids are selectable: all remaining Schur " \
            "complements vanish.".format(selectable, requested)
