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

import logging
import sys

LOGLEVELS = {
    None: logging.WARNING,
    0: logging.WARNING,
    1: logging.INFO,
    2: logging.DEBUG
}

log = logging.getLogger("parkrr")
_ch = logging.StreamHandler(sys.stderr)
_frmt = logging.Formatter("%(levelname)s: %(message)s")
_ch.setFormatter(_frmt)
log.setLevel(logging.WARNING)
log.addHandler(_ch)

def set_log_level(level):
    """Sets the log level

    :param int level: verbose level to set (count of -v flags)
    """

    log.setLevel(LOGLEVELS.get(level, logging.DEBUG))
