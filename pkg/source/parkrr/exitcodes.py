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

E_SUCCESS=0
E_NO_IMPLEMENTATION_FOUND=1
E_INVALID_CLI=2
E_INVALID_INPUT=2
E_NUMERICAL_ERROR=3
E_CONFIG_PROP_NOT_FOUND=4
E_CONFIG_FILE_PERMISSION_DENIED=5
E_CONFIG_FILE_NOT_CREATED=6
E_CONFIG_FILE_ALREADY_CREATED=7
