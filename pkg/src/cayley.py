"""Finite Cayley tables: associativity checks and the labeled semigroup census"""

import logging
from itertools import product
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np

from src.config import Config
from src.errors import InvalidParameter, NonAssociativeTable, OrderTooLarge

logger = logging.getLogger(__name__)

Table = Tuple[Tuple[int, ...], ...]


def normalize_table(order: int, table: Sequence) -> Table:
    """Accept a row-major flat list or nested rows; return rows as tuples"""
    if order < 1:
        raise InvalidParameter(f"order must be >= 1, got {order}")

    flat = list(table)
    if flat and isinstance(flat[0], (list, tuple)):
        flat = [v for row in flat for v in row]

    if len(flat) != order * order:
        raise InvalidParameter(f"table needs {order * order} entries, got {len(flat)}")
    if any(not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < order for v in flat):
        raise InvalidParameter(f"table entries must be element indices 0..{order - 1}")

    return tuple(tuple(flat[i * order:(i + 1) * order]) for i in range(order))


def find_associativity_violation(table: Table) -> Optional[Tuple[int, int, int]]:
    """Return the least triple (x, y, z) with (x+y)+z != x+(y+z), or None"""
    t = np.asarray(table, dtype=np.int64)
    n = t.shape[0]

    left = t[t]                                         # left[x, y, z] = (x+y)+z
    right = t[np.arange(n)[:, None, None], t[None, :, :]]  # right[x, y, z] = x+(y+z)

    bad = np.argwhere(left != right)
    if len(bad) == 0:
        return None
    return tuple(int(v) for v in bad[0])


def check_associative(table: Table) -> None:
    """Raise NonAssociativeTable with the least violating triple"""
    triple = find_associativity_violation(table)
    if triple is not None:
        raise NonAssociativeTable(triple)


def identity_of(table: Table) -> Optional[int]:
    """Two-sided identity of the table, if any"""
    rn = range(len(table))
    for e in rn:
        if all(table[e][x] == x == table[x][e] for x in rn):
            return e
    return None


def is_group_table(table: Table) -> bool:
    """A finite semigroup is a group iff it has an identity and every row is a permutation"""
    e = identity_of(table)
    if e is None:
        return False
    n = len(table)
    return all(len(set(row)) == n for row in table) and \
        all(len({table[x][y] for x in range(n)}) == n for y in range(n))


def enumerate_finite_semigroups(order: int) -> Iterator[Table]:
    """Yield every labeled associative table of the given order exactly once.

    Cells are filled row-major; after each assignment only the triples whose
    four lookups the new cell can complete are re-checked.
    """
    if order < 1:
        raise InvalidParameter(f"order must be >= 1, got {order}")
    if order > Config.MAX_CAYLEY_ORDER:
        raise OrderTooLarge(f"order {order} exceeds the census limit {Config.MAX_CAYLEY_ORDER}")

    n = order
    rn = range(n)
    table = [[-1] * n for _ in rn]
    cells = list(product(rn, rn))

    def holds(a: int, b: int, c: int) -> bool:
        ab, bc = table[a][b], table[b][c]
        if ab < 0 or bc < 0:
            return True
        left, right = table[ab][c], table[a][bc]
        return left < 0 or right < 0 or left == right

    def consistent_at(x: int, y: int) -> bool:
        for z in rn:
            if not holds(x, y, z) or not holds(z, x, y):
                return False
        for a in rn:
            for b in rn:
                if table[a][b] == x and not holds(a, b, y):
                    return False
                if table[a][b] == y and not holds(x, a, b):
                    return False
        return True

    def fill(pos: int) -> Iterator[Table]:
        if pos == len(cells):
            yield tuple(tuple(row) for row in table)
            return
        x, y = cells[pos]
        for v in rn:
            table[x][y] = v
            if consistent_at(x, y):
                yield from fill(pos + 1)
        table[x][y] = -1

    count = 0
    for found in fill(0):
        count += 1
        yield found
    logger.info(f"Census of order {order}: {count} labeled semigroups")
