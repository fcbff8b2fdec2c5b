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
from parkrr.argparser import ArgParser
from parkrr.exceptions import InvalidCommandLineException, InvalidActionException, ParkException
from parkrr.logmanager import log, set_log_level
from importlib import import_module

def main(args=None):
    if not args:
        args = sys.argv[1:]

    # let's parse cli arguments with ArgParser()
    argparser = ArgParser(args)
    parsed_args = argparser.parse()

    # set log level
    set_log_level(parsed_args["verbose"])

    # if no sub-command/action was specified
    if not parsed_args["action"]:
        argparser.print_help()
        raise InvalidCommandLineException()

    try:
        execute(parsed_args)
    except ParkException as e:
        log.error("%s", e)
        sys.exit(e.exit_code)

def execute(args):
    # for the passed action/sub-command it's required to find the appropriate "Action Class". Each
    # sub-command has its own action class
    command = {
        "config": "config",
        "c": "config",
        "synth": "synth",
        "s": "synth",
        "train": "train",
        "t": "train",
        "predict": "predict",
        "p": "predict",
        "bench": "bench",
        "b": "bench",
        "diagnose": "diagnose",
        "d": "diagnose"
    }

    action = command.get(args["action"], args["action"])

    try:
        class_name = action.title()
        module = import_module("parkrr.actions.{}".format(action))

        # initialize class
        instance = getattr(module, class_name)()
    except ImportError:
        raise InvalidActionException(action)

    instance.execute(args)
