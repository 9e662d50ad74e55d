# This library is free software; you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation; either version 3 of the License, or
# (at your option) any later version.
#
# This library is distributed in the hope that it will be useful, but
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the GNU
# General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this library; if not, see <http://www.gnu.org/licenses/>.

"""
preoccupied.bioblend.errors
Exception types raised across the package.

:author: Christopher O'Brien <obriencj@preoccupied.net>
:license: GNU General Public License v3
:ai-assistant: GPT-5 Codex via Cursor
"""


__all__ = (
    "BoundsError",
    "CaseDataError",
    "ConfigError",
    "HorizonError",
    "SequenceError",
    "SolverError",
)


class HorizonError(ValueError):
    """
    A bale sequence does not fit in the planning horizon.
    """

    def __init__(self, required: int, horizon: int) -> None:
        super().__init__(
            f"sequence needs {required} periods but the horizon is {horizon};"
            f" raise the horizon to at least {required}")
        self.required = required
        self.horizon = horizon


class SequenceError(ValueError):
    """
    A bale ordering is malformed or disagrees with the inventory.
    """


class CaseDataError(ValueError):
    """
    A case data file could not be read. The message names the file, row
    and column of the offending cell.
    """


class ConfigError(ValueError):
    """
    A run configuration is invalid or references missing files.
    """


class BoundsError(ValueError):
    """
    Parameters of a bound procedure are out of range.
    """


class SolverError(RuntimeError):
    """
    A solver backend failed in a way that is not a model verdict.
    """


# The end.
