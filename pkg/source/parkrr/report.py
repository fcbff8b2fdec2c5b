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

import csv
import json
from prettytable import PrettyTable

# one row per run, in the usual "error / init / train / total" layout
CSV_COLUMNS = ["method", "metric", "error", "error_std", "init", "train", "predict", "total",
               "trials"]

def write_json(report, path):
    with open(path, "w") as f:
        json.dump(report, f, indent=2, sort_keys=True, allow_nan=False)

def read_json(path):
    with open(path, "r") as f:
        return json.load(f)

def table_rows(reports):
    """Flattens run reports into rows keyed by CSV_COLUMNS"""

    rows = []
    for report in reports:
        summary = report.get("summary")
        if not summary:
            continue

        rows.append({
            "method": summary["mode"],
            "metric": summary["metric"],
            "error": summary["error"]["mean"],
            "error_std": summary["error"]["std"],
            "init": summary["init"]["mean"],
            "train": summary["train"]["mean"],
            "predict": summary["predict"]["mean"],
            "total": summary["total"]["mean"],
            "trials": summary["trials"]
        })

    return rows

def write_csv(reports, path):
    """Writes the summary of every report as one CSV row

    :param list reports: run reports
    :param string path: output file
    """

    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(table_rows(reports))

def summary_table(reports):
    table = PrettyTable(["Method", "Metric", "Error", "Init [s]", "Train [s]", "Total [s]"])

    for row in table_rows(reports):
        if row["trials"] > 1:
            error = "{:.4g} ± {:.2g}".format(row["error"], row["error_std"])
        else:
            error = "{:.4g}".format(row["error"])

        table.add_row([row["method"], row["metric"], error, "{:.3f}".format(row["init"]),
                       "{:.3f}".format(row["train"]), "{:.3f}".format(row["total"])])

    return table

def verdict_table(diagnostics):
    """Bound verdicts of a diagnostics report dictionary"""

    table = PrettyTable(["Check", "LHS", "RHS", "Slack", "Passed", "Kind"])

    for verdict in diagnostics["verdicts"]:
        if verdict["condition"]:
            kind = "condition"
        elif verdict["deterministic"]:
            kind = "deterministic"
        else:
            kind = "high probability"

        table.add_row([verdict["name"], "{:.4g}".format(verdict["lhs"]),
                       "{:.4g}".format(verdict["rhs"]), "{:.4g}".format(verdict["slack"]),
                       "yes" if verdict["passed"] else "no", kind])

    return table

def cell_table(diagnostics):
    table = PrettyTable(["Cell", "n_q", "rho_q", "R_q", "lam_q", "N_q", "N_inf,q",
                         "||P_q f*||^2"])

    for cell in diagnostics["cells"]:
        table.add_row([cell["cell"], cell["n_q"], "{:.3f}".format(cell["rho_q"]),
                       _fmt(cell["risk_q"]), "{:.3g}".format(cell["lam_q"]),
                       "{:.3f}".format(cell["effective_dim"]),
                       "{:.3f}".format(cell["effective_dim_inf"]), _fmt(cell["proj_norm_sq"])])

    return table

def _fmt(value):
    return "-" if value is None else "{:.4g}".format(value)
