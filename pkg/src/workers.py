"""Ordered fan-out of search strata with a worker-count independent reduction"""

import logging
import multiprocessing
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Iterator, Optional, Sequence, Tuple

from src.config import Config

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StratumResult:
    """Outcome of one stratum searched with the full budget"""

    value: Optional[Any]
    nodes_to_value: int
    nodes_used: int


def map_strata(task: Callable[[Any], StratumResult], strata: Sequence[Any],
               workers: Optional[int] = None) -> Iterator[StratumResult]:
    """Yield task(stratum) in stratum order, in-process or from a pool.

    `task` must be a module-level function so it can be pickled.
    """
    workers = workers or Config.WORKERS
    if workers <= 1 or len(strata) <= 1:
        for stratum in strata:
            yield task(stratum)
        return

    with multiprocessing.Pool(min(workers, len(strata))) as pool:
        yield from pool.imap(task, strata)


def first_within_budget(results: Iterable[StratumResult], budget: int) -> Tuple[Optional[Any], int, bool]:
    """Charge strata in order against one budget; return (value, nodes, exhausted).

    A stratum's value counts only if it was reached before the shared budget
    ran out, so the answer is the same for any number of workers.
    """
    spent = 0
    for result in results:
        if result.value is not None and spent + result.nodes_to_value <= budget:
            return result.value, spent + result.nodes_to_value, False
        spent += result.nodes_used
        if spent >= budget:
            logger.warning(f"Search budget of {budget} nodes exhausted")
            return None, budget, True
    return None, spent, False
