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

from parkrr.actions.action import Action
from parkrr.exceptions import InvalidCommandLineException
from parkrr.general import RUN_MODES
from parkrr.report import summary_table, write_csv, write_json
from parkrr.runner import load_dataset, resolve_kernel, run

class Bench(Action):
    def __init__(self):
        pass

    def execute(self, args):
        """@see Action.execute()
        """

        modes = [mode.strip() for mode in args["modes"].split(",") if mode.strip()]
        unknown = [mode for mode in modes if mode not in RUN_MODES]

        if not modes or unknown:
            raise InvalidCommandLineException("Unknown run modes: {}".format(", ".join(unknown)))

        config = self.load_config(args)

        # every mode sees the same data in a trial
        data = None
        if config["run.trials"] == 1:
            data = load_dataset(config, resolve_kernel(config))

        reports = []
        for mode in modes:
            reports.append(run(config.override({"run.mode": mode, "output.report": "",
                                                "output.csv": "", "output.model": ""}), data))

        if config["output.report"]:
            write_json({"runs": reports}, config["output.report"])

        if config["output.csv"]:
            write_csv(reports, config["output.csv"])

        print(summary_table(reports))
