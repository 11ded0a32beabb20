"""Finite-scale monochromatic finite-sums searches.

A witness is a proper prefix b_1..b_k (a_F1 != a_F2 whenever F1 < F2, which
forces the b's to be distinct) whose whole finite-sums set carries one color.
When the search runs over a universe, every finite sum must also lie in the
universe, since colors off the universe are not part of the experiment.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from src.coloring import Coloring, RecoloredColoring, TableColoring
from src.config import Config
from src.errors import InvalidParameter
from src.fs_core import (IndexSet, SequencePrefix, SumsequencePrefix, fs_ge2, fs_set,
                         is_proper_prefix)
from src.semigroups import Element, Semigroup
from src.workers import StratumResult, first_within_budget, map_strata

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MonoFsWitness:
    sumsequence: SumsequencePrefix
    color: int

    @property
    def terms(self) -> Tuple[Element, ...]:
        return self.sumsequence.derived

    @property
    def fs(self) -> FrozenSet[Element]:
        return fs_set(self.sumsequence.as_prefix()).elements

    def to_json(self) -> Dict:
        S = self.sumsequence.base.semigroup
        return {
            **self.sumsequence.to_json(),
            'color': self.color,
            'fs': [S.to_wire(x) for x in sorted(self.fs, key=S.rank)],
        }


@dataclass
class _Palette:
    """Colors seen by a search; None marks elements outside the universe"""

    semigroup: Semigroup
    coloring: Coloring
    universe: Optional[FrozenSet[Element]] = None
    cache: Dict[Element, Optional[int]] = field(default_factory=dict)

    def color_of(self, x: Element) -> Optional[int]:
        if x not in self.cache:
            inside = self.universe is None or x in self.universe
            self.cache[x] = self.coloring.color(self.semigroup, x) if inside else None
        return self.cache[x]


@dataclass(frozen=True)
class _Candidate:
    index_set: Tuple[int, ...]
    element: Element


def _extend(S: Semigroup, values: List[Element], earliest_end: Dict[Element, int],
            b: Element, position: int, palette: _Palette, color: int
            ) -> Optional[Tuple[List[Element], Dict[Element, int]]]:
    """Append b as term number `position`; None if the prefix stops being a witness.

    values[mask] holds the sum over the terms marked in mask, earliest_end[v]
    the least last-term over masks with sum v.
    """
    top = 1 << (position - 1)
    fresh = [b] + [S.combine(values[mask], b) for mask in range(1, top)]
    for offset, v in enumerate(fresh):
        if palette.color_of(v) != color:
            return None
        mask = top | offset
        lowest = (mask & -mask).bit_length()
        if earliest_end.get(v, position) < lowest:
            return None
    ends = dict(earliest_end)
    for v in fresh:
        ends.setdefault(v, position)
    return values + fresh, ends


def _mono_dfs(S: Semigroup, candidates: Sequence[_Candidate], first: int, k: int,
              palette: _Palette, forbidden: FrozenSet[int], budget: int) -> StratumResult:
    """Lexicographically least chain of candidates starting with candidates[first]"""
    head = candidates[first]
    color = palette.color_of(head.element)
    if color is None or color in forbidden:
        return StratumResult(None, 1, 1)

    start = _extend(S, [None], {}, head.element, 1, palette, color)
    if start is None:
        return StratumResult(None, 1, 1)
    if k == 1:
        return StratumResult((first,), 1, 1)

    nodes = 1
    chain = [first]

    def search(values, ends, last_end) -> Optional[Tuple[int, ...]]:
        nonlocal nodes
        depth = len(chain) + 1
        for idx in range(len(candidates)):
            cand = candidates[idx]
            if cand.index_set[0] <= last_end:
                continue
            if nodes >= budget:
                return None
            nodes += 1
            extended = _extend(S, values, ends, cand.element, depth, palette, color)
            if extended is None:
                continue
            chain.append(idx)
            if depth == k:
                return tuple(chain)
            found = search(extended[0], extended[1], cand.index_set[-1])
            if found:
                return found
            chain.pop()
        return None

    found = search(start[0], start[1], head.index_set[-1])
    return StratumResult(found, nodes, nodes)


def _mono_stratum(args) -> StratumResult:
    return _mono_dfs(*args)


def _search_chains(S: Semigroup, base: SequencePrefix, candidates: List[_Candidate], k: int,
                   palette: _Palette, forbidden: FrozenSet[int], budget: int,
                   workers: Optional[int]) -> Optional[MonoFsWitness]:
    strata = [(S, candidates, i, k, palette, forbidden, budget) for i in range(len(candidates))]
    found, used, exhausted = first_within_budget(map_strata(_mono_stratum, strata, workers), budget)
    if found is None:
        note = 'budget exhausted' if exhausted else 'search space exhausted'
        logger.info(f"No monochromatic FS with {k} terms in {S.describe()} ({note}, {used} nodes)")
        return None

    index_sets = tuple(IndexSet(candidates[i].index_set) for i in found)
    sumsequence = SumsequencePrefix(base, index_sets)
    color = palette.color_of(sumsequence.derived[0])
    logger.info(f"Monochromatic FS found after {used} nodes: {[list(F) for F in index_sets]}")
    return MonoFsWitness(sumsequence, color)


def find_mono_fs(S: Semigroup, universe: SequencePrefix, coloring: Coloring, k: int,
                 budget: Optional[int] = None, forbidden_colors: Sequence[int] = (),
                 workers: Optional[int] = None) -> Optional[MonoFsWitness]:
    """Proper b_1..b_k taken in universe order with FS(b) monochromatic inside the universe"""
    if k < 1:
        raise InvalidParameter(f"k must be >= 1, got {k}")
    budget = budget or Config.DEFAULT_BUDGET
    palette = _Palette(S, coloring, frozenset(universe.elements))
    candidates = [_Candidate((i,), x) for i, x in enumerate(universe.elements, start=1)]
    return _search_chains(S, universe, candidates, k, palette, frozenset(forbidden_colors),
                          budget, workers)


def find_mono_fs_within(S: Semigroup, base: SequencePrefix, coloring: Coloring, k: int,
                        budget: Optional[int] = None, max_block: Optional[int] = None,
                        workers: Optional[int] = None) -> Optional[MonoFsWitness]:
    """Proper sumsequence of `base` over blocks of size <= max_block with FS monochromatic"""
    if k < 1:
        raise InvalidParameter(f"k must be >= 1, got {k}")
    budget = budget or Config.DEFAULT_BUDGET
    max_block = max_block or Config.MAX_BLOCK
    n = len(base)
    candidates = []
    for size in range(1, min(max_block, n) + 1):
        for F in combinations(range(1, n + 1), size):
            candidates.append(_Candidate(F, S.sum([base.at(i) for i in F])))
    palette = _Palette(S, coloring)
    return _search_chains(S, base, candidates, k, palette, frozenset(), budget, workers)


def verify_mono_witness(S: Semigroup, coloring: Coloring, witness: MonoFsWitness,
                        universe: Optional[Sequence[Element]] = None) -> List[str]:
    """Recompute the FS set and every color; returns the failed claims"""
    failures = []
    try:
        rebuilt = SumsequencePrefix(witness.sumsequence.base, witness.sumsequence.index_sets)
    except Exception as e:
        return [f"sumsequence does not rebuild: {e}"]
    terms = rebuilt.as_prefix()
    if not is_proper_prefix(terms):
        failures.append("terms are not a proper prefix")
    allowed = None if universe is None else set(universe)
    for x in fs_set(terms).elements:
        if allowed is not None and x not in allowed:
            failures.append(f"finite sum {S.to_wire(x)} lies outside the universe")
        elif coloring.color(S, x) != witness.color:
            failures.append(f"finite sum {S.to_wire(x)} has color {coloring.color(S, x)}, not {witness.color}")
    return failures


# -- thresholds -----------------------------------------------------------------------

def witness_position_sets(S: Semigroup, universe: Sequence[Element], k: int) -> List[FrozenSet[int]]:
    """Universe positions covered by FS(b) for every proper k-term witness inside the universe"""
    position = {}
    for i, x in enumerate(universe, start=1):
        position.setdefault(x, i)
    found: Set[FrozenSet[int]] = set()
    terms: List[Element] = []

    def grow(values, ends, after):
        depth = len(terms) + 1
        for p in range(after + 1, len(universe) + 1):
            b = universe[p - 1]
            top = 1 << (depth - 1)
            fresh = [b] + [S.combine(values[mask], b) for mask in range(1, top)]
            if any(v not in position for v in fresh):
                continue
            if any(ends.get(v, depth) < ((top | off) & -(top | off)).bit_length()
                   for off, v in enumerate(fresh)):
                continue
            new_ends = dict(ends)
            for v in fresh:
                new_ends.setdefault(v, depth)
            terms.append(b)
            if depth == k:
                found.add(frozenset(position[v] for v in values[1:] + fresh))
            else:
                grow(values + fresh, new_ends, p)
            terms.pop()

    grow([None], {}, 0)
    return sorted(found, key=lambda W: (max(W), sorted(W)))


def has_mono_witness_bruteforce(S: Semigroup, universe: Sequence[Element], coloring: Coloring,
                                k: int) -> bool:
    """Oracle: try every k-subset of universe positions"""
    inside = set(universe)
    for picks in combinations(range(len(universe)), k):
        prefix = SequencePrefix(S, tuple(universe[p] for p in picks))
        if not is_proper_prefix(prefix):
            continue
        sums = fs_set(prefix).elements
        if not sums <= inside:
            continue
        if len({coloring.color(S, x) for x in sums}) == 1:
            return True
    return False


@dataclass
class ThresholdResult:
    status: str  # reached | not_reached | inconclusive
    k: int
    colors: int
    threshold: Optional[int] = None
    avoider: Optional[List[int]] = None
    universe: List[Element] = field(default_factory=list)
    budget_used: int = 0

    def avoider_coloring(self) -> Optional[TableColoring]:
        if self.avoider is None:
            return None
        entries = tuple(zip(self.universe, self.avoider))
        return TableColoring(self.colors, entries=entries, default=0)

    def to_json(self, S: Semigroup) -> Dict:
        return {
            'status': self.status,
            'k': self.k,
            'colors': self.colors,
            'threshold': self.threshold,
            'avoider': self.avoider,
            'universe': [S.to_wire(x) for x in self.universe],
            'budget_used': self.budget_used,
        }


def _avoider_search(args) -> StratumResult:
    """Least avoiding coloring of positions 1..n whose first colors are `fixed`"""
    n, r, witness_sets, fixed, budget = args
    by_max: Dict[int, List[FrozenSet[int]]] = {}
    for W in witness_sets:
        by_max.setdefault(max(W), []).append(W)

    colors = [0] * (n + 1)
    nodes = 0

    def clean(p: int) -> bool:
        return all(len({colors[q] for q in W}) > 1 for W in by_max.get(p, ()))

    for p, c in enumerate(fixed, start=1):
        colors[p] = c
        if not clean(p):
            return StratumResult(None, 1, 1)

    def assign(p: int, used: int) -> bool:
        nonlocal nodes
        if p > n:
            return True
        for c in range(min(used + 1, r)):
            if nodes >= budget:
                return False
            nodes += 1
            colors[p] = c
            if clean(p) and assign(p + 1, max(used, c + 1)):
                return True
        return False

    used = max(fixed) + 1 if fixed else 0
    if assign(len(fixed) + 1, used):
        return StratumResult(colors[1:], nodes, nodes)
    return StratumResult(None, nodes, nodes)


def _color_prefixes(depth: int, r: int) -> List[Tuple[int, ...]]:
    """Symmetry-broken color assignments of the first `depth` positions, in order"""
    prefixes = [(0,)]
    for _ in range(depth - 1):
        prefixes = [p + (c,) for p in prefixes for c in range(min(max(p) + 2, r))]
    return prefixes


def exhaustive_threshold(S: Semigroup, k: int, r: int, max_n: int, budget: Optional[int] = None,
                         workers: Optional[int] = None) -> ThresholdResult:
    """Least N such that every r-coloring of the first N elements has a monochromatic witness"""
    if k < 2 or r < 1 or max_n < 1:
        raise InvalidParameter(f"threshold needs k >= 2, r >= 1, max_n >= 1 (got {k}, {r}, {max_n})")
    budget = budget or Config.DEFAULT_BUDGET
    universe = S.enumerate(max_n)
    all_sets = witness_position_sets(S, universe, k)

    spent = 0
    previous: Optional[List[int]] = []
    for n in range(1, len(universe) + 1):
        sets_n = [W for W in all_sets if max(W) <= n]
        strata = [(n, r, sets_n, fixed, budget - spent) for fixed in _color_prefixes(min(n, 3), r)]
        avoider, used, exhausted = first_within_budget(map_strata(_avoider_search, strata, workers),
                                                       budget - spent)
        spent += used
        if exhausted:
            return ThresholdResult('inconclusive', k, r, universe=universe[:n], budget_used=spent)
        if avoider is None:
            logger.info(f"{S.describe()}: every {r}-coloring of {n} elements has a {k}-term witness")
            return ThresholdResult('reached', k, r, threshold=n, avoider=previous,
                                   universe=universe[:n - 1], budget_used=spent)
        previous = list(avoider)

    return ThresholdResult('not_reached', k, r, avoider=previous, universe=universe, budget_used=spent)


# -- disjoint families ------------------------------------------------------------------

@dataclass
class DisjointFamilyReport:
    families: List[MonoFsWitness]
    fs2_sets: List[FrozenSet[Element]]
    trace: List[str]
    requested: int
    alpha: int
    beta: int

    @property
    def complete(self) -> bool:
        return len(self.families) == self.requested

    def to_json(self, S: Semigroup) -> Dict:
        return {
            'families': [w.to_json() for w in self.families],
            'fs2_sets': [[S.to_wire(x) for x in sorted(B, key=S.rank)] for B in self.fs2_sets],
            'trace': list(self.trace),
            'requested': self.requested,
            'complete': self.complete,
            'alpha': self.alpha,
            'beta': self.beta,
        }


def find_disjoint_mono_families(S: Semigroup, coloring: Coloring, m: int, k: int,
                                horizon: Optional[int] = None, budget: Optional[int] = None,
                                workers: Optional[int] = None) -> DisjointFamilyReport:
    """Find m monochromatic FS sets, recoloring each one out of the way.

    After family A_i with B_i = FS>=2 of its terms, elements of A_i \\ B_i get
    the fresh color alpha and elements of B_i the fresh color beta; later
    searches forbid both, so every family keeps its original color and
    avoids all earlier ones.
    """
    if m < 1 or k < 2:
        raise InvalidParameter(f"disjoint families need m >= 1 and k >= 2 (got {m}, {k})")
    horizon = horizon or Config.DEFAULT_HORIZON
    universe = SequencePrefix.from_stream(S, horizon)
    alpha, beta = coloring.colors, coloring.colors + 1
    current = RecoloredColoring(coloring.colors + 2, coloring, ())

    report = DisjointFamilyReport([], [], [], m, alpha, beta)
    for i in range(1, m + 1):
        witness = find_mono_fs(S, universe, current, k, budget, (alpha, beta), workers)
        if witness is None:
            report.trace.append(f"family {i}: no monochromatic FS at horizon {horizon}")
            break
        terms = witness.sumsequence.as_prefix()
        A = witness.fs
        B = fs_ge2(terms).elements
        report.families.append(witness)
        report.fs2_sets.append(B)
        report.trace.append(
            f"family {i}: color {witness.color}, |A|={len(A)}, |B|={len(B)}; "
            f"alpha on {len(A - B)} elements, beta on {len(B)}")
        current = current.with_overrides({**{x: alpha for x in A - B}, **{x: beta for x in B}})

    if not report.complete:
        logger.warning(f"Found {len(report.families)} of {m} disjoint families")
    return report


def verify_disjoint_families(S: Semigroup, coloring: Coloring, report: DisjointFamilyReport,
                             universe: Optional[Sequence[Element]] = None) -> List[str]:
    failures = []
    seen: Set[Element] = set()
    for i, (witness, B) in enumerate(zip(report.families, report.fs2_sets), start=1):
        failures += [f"family {i}: {f}" for f in verify_mono_witness(S, coloring, witness, universe)]
        if fs_ge2(witness.sumsequence.as_prefix()).elements != B:
            failures.append(f"family {i}: recorded FS>=2 set does not match")
        A = witness.fs
        if A & seen:
            failures.append(f"family {i} overlaps an earlier family")
        seen |= A
    return failures
