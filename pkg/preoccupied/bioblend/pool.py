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
preoccupied.bioblend.pool
Replication dispatch over a worker pool.

Replications are submitted in index order and each idle worker takes
the next one waiting. Results always come back in replication order,
so nothing downstream can tell how many workers there were.

:author: Christopher O'Brien <obriencj@preoccupied.net>
:license: GNU General Public License v3
:ai-assistant: GPT-5 Codex via Cursor
"""


import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Sequence, TypeVar


__all__ = (
    "map_replications",
)


logger = logging.getLogger(__name__)


T = TypeVar("T")
R = TypeVar("R")


def map_replications(
        fn: Callable[[T], R],
        tasks: Sequence[T],
        pool_size: int = 1) -> List[R]:
    """
    Apply ``fn`` to every task, in worker processes when ``pool_size``
    is above one. ``fn`` and the tasks must pickle.
    """

    if pool_size < 1:
        raise ValueError(f"pool size must be at least 1, got {pool_size}")

    if pool_size == 1 or len(tasks) <= 1:
        results = []
        for j, task in enumerate(tasks):
            logger.info("running replication %d", j + 1)
            results.append(fn(task))
        return results

    workers = min(pool_size, len(tasks))
    with ProcessPoolExecutor(max_workers=workers) as executor:
        futures = []
        for j, task in enumerate(tasks):
            logger.info("submitting replication %d", j + 1)
            futures.append(executor.submit(fn, task))
        return [future.result() for future in futures]


# The end.
