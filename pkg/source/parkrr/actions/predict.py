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
import sys
from parkrr.actions.action import Action
from parkrr.dataset import load_points, read_cache
from parkrr.general import DATASET_MAGIC
from parkrr.logmanager import log
from parkrr.modelfile import load_model

class Predict(Action):
    def __init__(self):
        pass

    def execute(self, args):
        """@see Action.execute()
        """

        model = load_model(args["model"])
        X = self.read_points(args["input"], args["delimiter"], args["header"])
        predictions = model.predict(X)

        log.info("Predicted %d points with the %s model", predictions.shape[0], model.kind)

        if args["output"]:
            with open(args["output"], "w", newline="") as f:
                self.write_predictions(f, predictions)
        else:
            self.write_predictions(sys.stdout, predictions)

    def read_points(self, path, delimiter, header):
        """Reads query points from a dataset cache or a delimited text file

        :param string path: input file
        :return ndarray: points
        """

        with open(path, "rb") as f:
            magic = f.read(len(DATASET_MAGIC))

        if magic == DATASET_MAGIC:
            return read_cache(path).X

        return load_points(path, delimiter, header)

    def write_predictions(self, stream, predictions):
        writer = csv.writer(stream)
        for value in predictions:
            writer.writerow([repr(float(value))])
