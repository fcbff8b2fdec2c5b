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
from parkrr.diagnostics import write_cell_csv
from parkrr.exceptions import InconsistentInputsException
from parkrr.report import cell_table, verdict_table, write_json
from parkrr.runner import load_dataset, resolve_kernel, run_trial

class Diagnose(Action):
    def __init__(self):
        pass

    def execute(self, args):
        """@see Action.execute()
        """

        config = self.load_config(args)
        mode = "park-uni" if config["partition.mode"] == "uniform" else "park"
        config = config.override({"run.mode": mode, "diagnostics.enabled": True})

        if not config["solver.scaling"]:
            raise InconsistentInputsException("diagnostics need solver.scaling=true")

        data = load_dataset(config, resolve_kernel(config))
        if data.truth is None:
            raise InconsistentInputsException("diagnostics need a ground truth: use synthetic " \
                "data or a dataset cache written by 'parkrr synth'")

        record, _ = run_trial(config, 0, data)
        diagnostics = record["diagnostics"]

        if config["output.report"]:
            write_json(record, config["output.report"])

        if config["output.csv"]:
            write_cell_csv(diagnostics["cells"], config["output.csv"])

        print("Excess risk: {:.6g}   N(lam): {:.4f}   cos(theta): {:.4f}".format(
            diagnostics["risk"], diagnostics["effective_dim"], diagnostics["cos_theta"]))
        print(cell_table(diagnostics))
        print(verdict_table(diagnostics))
