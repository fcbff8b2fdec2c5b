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
from parkrr.report import summary_table
from parkrr.runner import run

class Train(Action):
    def __init__(self):
        pass

    def execute(self, args):
        """@see Action.execute()
        """

        report = run(self.load_config(args))
        print(summary_table([report]))
