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

import argparse
from parkrr.general import __version__, DEFAULTS, RUN_MODES
from parkrr.runconfig import SCHEMA

class ArgParser:

    def __init__(self, args):
        self.args = args
        self.parser = argparse.ArgumentParser(
            description="Partitioned kernel ridge regression with sketched preconditioned " \
            "conjugate gradient solvers."
        )
        self.cmdSubParser = self.parser.add_subparsers(
            dest="action",
            title="Available subcommands",
        )

        self.addGlobalOptions()
        self.addConfigCommand()
        self.addSynthCommand()
        self.addTrainCommand()
        self.addPredictCommand()
        self.addBenchCommand()
        self.addDiagnoseCommand()

    def print_help(self):
        self.parser.print_help()

    def parse(self):
        return vars(self.parser.parse_args(args=self.args))

    def addGlobalOptions(self):
        self.parser.add_argument(
            "--version", action="version", help="Displays the current version of this program.",
            version="parkrr Version {}".format(__version__)
        )

        self.parser.add_argument(
            "-v", "--verbose", action="count", help="Increase verbosity level"
        )

    def addRunConfigOptions(self, cmd):
        """Adds --config and one flag per run configuration key, spelled like the key
        """

        cmd.add_argument(
            "--config", action="store", help="Path to a configuration file. Its values " \
            "override the global and the user configuration, flags override all of them."
        )

        group = cmd.add_argument_group("configuration keys")
        for key in SCHEMA:
            group.add_argument(
                "--{}".format(key), dest=key, action="store", default=None, metavar="VALUE",
                help="(default: {})".format(DEFAULTS[key] if DEFAULTS[key] != "" else "unset")
            )

    def addConfigCommand(self):
        cmd = self.cmdSubParser.add_parser(
            "config", aliases=["c"], help="Modifying the configuration file."
        )

        config_group = cmd.add_mutually_exclusive_group(required=True)

        config_group.add_argument(
            "--global", "-g", action="store_true", help="Specifies to use the global " \
            "configuration which is stored in the configuration directory /etc."
        )

        config_group.add_argument(
            "--user", "-u", action="store_true", help="Specifies to use the user configuration " \
            "which is stored in the home directory of the current user."
        )

        config_group.add_argument(
            "--own", "-o", action="store_true", help="Specifies to use an own specified " \
            "configuration which needs to be specified by --path"
        )

        config_group.add_argument(
            "--generate", action="store_true", help="Generates a documented configuration " \
            "file. The location must be set via --path."
        )

        cmd.add_argument(
            "--force", action="store_true", help="Force the creation of a config file."
        )

        cmd.add_argument(
            "--path", action="store", help="Specifies a path to a configuration file."
        )

        cmd.add_argument(
            "--property", "-p", action="store",
            help="Specifies a property from the config file, e.g. solver.lam. If no value is " \
            "set with --value, only the current value of the property will be print on the " \
            "command line."
        )

        cmd.add_argument(
            "--value", action="store", help="Sets a new value for a property."
        )

    def addSynthCommand(self):
        cmd = self.cmdSubParser.add_parser(
            "synth", aliases=["s"], help="Generates a synthetic fixed-design dataset and " \
            "stores it in the binary dataset cache together with its ground truth."
        )

        cmd.add_argument(
            "--output", action="store", required=True, help="Path of the dataset cache file. " \
            "The ground truth is written next to it."
        )

        self.addRunConfigOptions(cmd)

    def addTrainCommand(self):
        cmd = self.cmdSubParser.add_parser(
            "train", aliases=["t"], help="Trains the estimator selected by run.mode, evaluates " \
            "it and writes the configured report, table and model files."
        )

        self.addRunConfigOptions(cmd)

    def addPredictCommand(self):
        cmd = self.cmdSubParser.add_parser(
            "predict", aliases=["p"], help="Evaluates a stored model on new points."
        )

        cmd.add_argument(
            "--model", action="store", required=True, help="Path of a model artifact."
        )

        cmd.add_argument(
            "--input", action="store", required=True, help="Query points: a dataset cache " \
            "file or a delimited text file with one point per row."
        )

        cmd.add_argument(
            "--output", action="store", help="Writes the predictions to this file instead " \
            "of the standard output."
        )

        cmd.add_argument(
            "--delimiter", action="store", default=",", help="Field delimiter of a text input."
        )

        cmd.add_argument(
            "--header", action="store_true", help="The text input starts with a header line."
        )

    def addBenchCommand(self):
        cmd = self.cmdSubParser.add_parser(
            "bench", aliases=["b"], help="Runs several estimators on the same data and prints " \
            "a comparison table."
        )

        cmd.add_argument(
            "--modes", action="store", default=",".join(RUN_MODES), help="Comma separated " \
            "list of run modes (default: all)."
        )

        self.addRunConfigOptions(cmd)

    def addDiagnoseCommand(self):
        cmd = self.cmdSubParser.add_parser(
            "diagnose", aliases=["d"], help="Trains the partitioned estimator on data with a " \
            "known ground truth and checks the theoretical bounds."
        )

        self.addRunConfigOptions(cmd)
