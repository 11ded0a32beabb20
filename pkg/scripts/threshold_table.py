#!/usr/bin/env python3
"""Print monochromatic finite-sums thresholds for a few families and color counts"""

import sys
import os
import logging

# Add src directory to path
sys.path.append(os.path.join(os.path.dirname(__file__), '..'))

from src.config import Config
from src.hindman_search import exhaustive_threshold
from src.semigroups import semigroup

ROWS = [
    ('naturals', {}, 2, 1, 12),
    ('naturals', {}, 2, 2, 12),
    ('naturals', {}, 3, 1, 16),
    ('steinberg', {}, 2, 1, 16),
    ('steinberg', {}, 2, 2, 24),
    ('direct_sum_group', {'p': 3}, 2, 2, 27),
]


def setup_logging():
    """Configure logging"""
    logging.basicConfig(
        level=getattr(logging, Config.LOG_LEVEL),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr
    )


def main():
    setup_logging()
    logger = logging.getLogger(__name__)

    print("📊 Monochromatic FS thresholds")
    print("=" * 50)
    print(f"{'family':<28} {'k':>2} {'r':>2} {'max_n':>6}  result")
    inconclusive = 0
    for family, params, k, r, max_n in ROWS:
        S = semigroup(family, **params)
        try:
            result = exhaustive_threshold(S, k, r, max_n)
        except Exception as e:
            logger.error(f"{S.describe()} k={k} r={r}: {e}")
            print(f"❌ {S.describe():<26} {k:>2} {r:>2} {max_n:>6}  error")
            inconclusive += 1
            continue
        if result.status == 'reached':
            shown = str(result.threshold)
        elif result.status == 'not_reached':
            shown = f"> {max_n}"
        else:
            shown = f"inconclusive after {result.budget_used} nodes"
            inconclusive += 1
        print(f"   {S.describe():<26} {k:>2} {r:>2} {max_n:>6}  {shown}")

    if inconclusive:
        print(f"\n❌ {inconclusive} row(s) without an answer")
        sys.exit(1)
    print("\n✅ Table complete")


if __name__ == "__main__":
    main()
