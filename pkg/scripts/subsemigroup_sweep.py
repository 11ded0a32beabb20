#!/usr/bin/env python3
"""Sweep small finite semigroups: every stable nonempty tail intersection must be a subsemigroup"""

import sys
import os
import logging
from itertools import product

# Add src directory to path
sys.path.append(os.path.join(os.path.dirname(__file__), '..'))

from src.cayley import enumerate_finite_semigroups
from src.fs_core import SequencePrefix, tail_intersection
from src.semigroups import semigroup

MAX_ORDER = 3
MAX_PERIOD = 3
LENGTH = 64
SCHEDULE = [24, 32, 48, 64]


def setup_logging():
    """Configure logging; tail reports are too chatty at INFO for a sweep"""
    logging.basicConfig(
        level=logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr
    )
    logging.getLogger('src.fs_core').setLevel(logging.WARNING)


def eventually_periodic(order: int):
    """(preperiod, period) pairs with preperiod <= 1 and period <= MAX_PERIOD"""
    for pre_len in (0, 1):
        for q in range(1, MAX_PERIOD + 1):
            for pre in product(range(order), repeat=pre_len):
                for period in product(range(order), repeat=q):
                    yield pre, period


def unroll(pre, period, length):
    return tuple(pre[n] if n < len(pre) else period[(n - len(pre)) % len(period)] for n in range(length))


def closed_under_add(S, values) -> bool:
    return all(S.add(x, y) in values for x in values for y in values)


def sweep_order(order: int, logger):
    tables = 0
    checked = 0
    failures = []
    for table in enumerate_finite_semigroups(order):
        tables += 1
        S = semigroup('finite_cayley', order=order, table=[v for row in table for v in row])
        for pre, period in eventually_periodic(order):
            report = tail_intersection(SequencePrefix(S, unroll(pre, period, LENGTH)), SCHEDULE)
            if not report.stable:
                continue
            checked += 1
            if not closed_under_add(S, report.value):
                failures.append((table, pre, period, sorted(report.value)))
                logger.error(f"Tail intersection {sorted(report.value)} not closed: "
                             f"table={table} pre={pre} period={period}")
    return tables, checked, failures


def main():
    """Run the sweep and report one line per order"""
    setup_logging()
    logger = logging.getLogger(__name__)

    print("🔍 Tail intersection closure sweep")
    print("=" * 50)
    all_failures = []
    for order in range(1, MAX_ORDER + 1):
        tables, checked, failures = sweep_order(order, logger)
        all_failures += failures
        mark = '✅' if not failures else '❌'
        print(f"{mark} order {order}: {tables} tables, {checked} stable nonempty intersections, "
              f"{len(failures)} not closed")

    if all_failures:
        print(f"\n❌ {len(all_failures)} counterexample(s)")
        sys.exit(1)
    print("\n✅ Every stable nonempty tail intersection is a subsemigroup")


if __name__ == "__main__":
    main()
