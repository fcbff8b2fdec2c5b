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

import parkrr.configmanager as configmanager
from parkrr.runconfig import RunConfig, SCHEMA

class Action:

    def execute(self, args):
        """Executes the main code for the current action

        :param dict args: A list of arguments what come from argparse
        """

        raise NotImplementedError("Method 'execute' was not implemented in Action Class.")

    def load_config(self, args):
        """Resolves the run configuration: defaults < configuration files < flags

        :param dict args: A list of arguments what come from argparse
        :return RunConfig: validated configuration
        """

        file_values = configmanager.load_layers(args.get("config"))
        cli_values = {key: args.get(key) for key in SCHEMA}

        return RunConfig.from_sources(file_values, cli_values)
