"""Index sets, finite-sums sets, properness predicates and tail intersections.

Indices are 1-based throughout. A sum over an index set is always folded
left to right in increasing index order, so nothing here assumes
commutativity.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from src.config import Config
from src.errors import IndexOutOfRange, InvalidParameter, PrefixTooLong, VerificationFailed
from src.semigroups import Element, Semigroup

logger = logging.getLogger(__name__)

Witness = Tuple[int, ...]


@dataclass(frozen=True)
class IndexSet:
    """Nonempty strictly increasing set of positive indices"""

    indices: Tuple[int, ...]

    def __post_init__(self):
        indices = tuple(self.indices)
        object.__setattr__(self, 'indices', indices)
        if not indices:
            raise InvalidParameter("index sets are nonempty")
        if any(not isinstance(i, int) or i < 1 for i in indices):
            raise InvalidParameter(f"indices must be positive integers: {indices}")
        if any(a >= b for a, b in zip(indices, indices[1:])):
            raise InvalidParameter(f"indices must be strictly increasing: {indices}")

    @classmethod
    def of(cls, *indices: int) -> 'IndexSet':
        return cls(tuple(indices))

    @property
    def min(self) -> int:
        return self.indices[0]

    @property
    def max(self) -> int:
        return self.indices[-1]

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def precedes(self, other: 'IndexSet') -> bool:
        """F1 < F2: every index of F1 comes before every index of F2"""
        return self.max < other.min

    def disjoint(self, other: 'IndexSet') -> bool:
        return not set(self.indices) & set(other.indices)

    def shifted(self, offset: int) -> 'IndexSet':
        return IndexSet(tuple(i + offset for i in self.indices))

    def shortlex_key(self) -> Tuple[int, Tuple[int, ...]]:
        return len(self.indices), self.indices

    def to_wire(self) -> List[int]:
        return list(self.indices)

    def __str__(self) -> str:
        return '{' + ','.join(str(i) for i in self.indices) + '}'


@dataclass(frozen=True)
class SequencePrefix:
    """Finite prefix a_1..a_n of a sequence in a semigroup"""

    semigroup: Semigroup
    elements: Tuple[Element, ...]
    bijective: bool = False

    def __post_init__(self):
        elements = tuple(self.elements)
        object.__setattr__(self, 'elements', elements)
        if not elements:
            raise InvalidParameter("sequence prefixes are nonempty")
        for x in elements:
            self.semigroup.check(x)
        if self.bijective and len(set(elements)) != len(elements):
            raise InvalidParameter("prefix flagged bijective has repeated elements")

    @classmethod
    def from_stream(cls, S: Semigroup, n: int) -> 'SequencePrefix':
        """First n elements in enumeration order"""
        return cls(S, tuple(S.enumerate(n)), bijective=True)

    def __len__(self) -> int:
        return len(self.elements)

    def at(self, i: int) -> Element:
        """a_i, 1-based"""
        if not 1 <= i <= len(self.elements):
            raise IndexOutOfRange(f"index {i} outside 1..{len(self.elements)}")
        return self.elements[i - 1]

    def window(self, start: int, end: int) -> 'SequencePrefix':
        """a_start..a_end as a fresh prefix (indices restart at 1)"""
        if not 1 <= start <= end <= len(self.elements):
            raise IndexOutOfRange(f"window {start}..{end} outside 1..{len(self.elements)}")
        return SequencePrefix(self.semigroup, self.elements[start - 1:end])

    def to_wire(self) -> List:
        return [self.semigroup.to_wire(x) for x in self.elements]


def sum_over(prefix: SequencePrefix, F: IndexSet) -> Element:
    """a_F, folded left to right"""
    if F.max > len(prefix):
        raise IndexOutOfRange(f"index set {F} exceeds prefix length {len(prefix)}")
    S = prefix.semigroup
    total = prefix.at(F.min)
    for i in F.indices[1:]:
        total = S.combine(total, prefix.at(i))
    return total


@dataclass(frozen=True)
class SumsequencePrefix:
    """b_i = a_{F_i} for increasing index sets F_1 < F_2 < ... < F_k"""

    base: SequencePrefix
    index_sets: Tuple[IndexSet, ...]
    derived: Optional[Tuple[Element, ...]] = None

    def __post_init__(self):
        index_sets = tuple(self.index_sets)
        object.__setattr__(self, 'index_sets', index_sets)
        if not index_sets:
            raise InvalidParameter("sumsequences need at least one index set")
        for F, G in zip(index_sets, index_sets[1:]):
            if not F.precedes(G):
                raise InvalidParameter(f"index sets must increase: {F} does not precede {G}")

        recomputed = tuple(sum_over(self.base, F) for F in index_sets)
        if self.derived is not None and tuple(self.derived) != recomputed:
            raise VerificationFailed("derived elements do not match their index sets")
        object.__setattr__(self, 'derived', recomputed)

    @classmethod
    def singletons(cls, base: SequencePrefix, indices: Iterable[int]) -> 'SumsequencePrefix':
        return cls(base, tuple(IndexSet.of(i) for i in indices))

    def __len__(self) -> int:
        return len(self.index_sets)

    def as_prefix(self, bijective: bool = False) -> SequencePrefix:
        return SequencePrefix(self.base.semigroup, self.derived, bijective=bijective)

    def to_json(self) -> Dict:
        S = self.base.semigroup
        return {
            'index_sets': [F.to_wire() for F in self.index_sets],
            'derived': [S.to_wire(x) for x in self.derived],
        }


@dataclass
class FsSet:
    """Finite-sums set with the lexicographically least witness of each element"""

    semigroup: Semigroup
    witnesses: Dict[Element, Witness] = field(default_factory=dict)

    @property
    def elements(self) -> FrozenSet[Element]:
        return frozenset(self.witnesses)

    def __len__(self) -> int:
        return len(self.witnesses)

    def __contains__(self, x: Element) -> bool:
        return x in self.witnesses

    def __iter__(self) -> Iterator[Element]:
        return iter(self.witnesses)

    def witness(self, x: Element) -> IndexSet:
        return IndexSet(self.witnesses[x])

    def sorted_elements(self) -> List[Element]:
        return sorted(self.witnesses, key=self.semigroup.rank)

    def to_json(self) -> Dict:
        S = self.semigroup
        ordered = self.sorted_elements()
        return {
            'elements': [S.to_wire(x) for x in ordered],
            'witnesses': [[S.to_wire(x), list(self.witnesses[x])] for x in ordered],
        }


def _check_length(prefix: SequencePrefix, cap: Optional[int]) -> None:
    cap = cap or Config.FS_LENGTH_CAP
    if len(prefix) > cap:
        raise PrefixTooLong(f"prefix length {len(prefix)} exceeds the cap {cap}")


def _suffix_tables(prefix: SequencePrefix) -> Tuple[Dict[Element, Witness], Dict[Element, Witness]]:
    """Suffix DP: (all sums, sums of >= 2 terms), each with least witnesses"""
    S = prefix.semigroup
    full: Dict[Element, Witness] = {}
    ge2: Dict[Element, Witness] = {}

    for i in range(len(prefix), 0, -1):
        a = prefix.at(i)
        extended: Dict[Element, Witness] = {}
        for s, w in full.items():
            value = S.combine(a, s)
            candidate = (i,) + w
            best = extended.get(value)
            if best is None or candidate < best:
                extended[value] = candidate

        # witnesses starting at i beat every witness starting later
        ge2.update(extended)
        extended[a] = (i,)
        full.update(extended)

    return full, ge2


def fs_set(prefix: SequencePrefix, cap: Optional[int] = None) -> FsSet:
    """FS(a_1..a_n) with one witness per element"""
    _check_length(prefix, cap)
    full, _ = _suffix_tables(prefix)
    return FsSet(prefix.semigroup, full)


def fs_ge2(prefix: SequencePrefix, cap: Optional[int] = None) -> FsSet:
    """Sums over index sets with at least two elements"""
    _check_length(prefix, cap)
    _, ge2 = _suffix_tables(prefix)
    return FsSet(prefix.semigroup, ge2)


def naive_fs_set(prefix: SequencePrefix) -> FsSet:
    """Brute-force fold over all 2^n - 1 index sets"""
    witnesses: Dict[Element, Witness] = {}
    for size in range(1, len(prefix) + 1):
        for F in combinations(range(1, len(prefix) + 1), size):
            value = sum_over(prefix, IndexSet(F))
            if value not in witnesses or F < witnesses[value]:
                witnesses[value] = F
    return FsSet(prefix.semigroup, witnesses)


def fs_values(S: Semigroup, elements: Sequence[Element], limit: Optional[int] = None) -> set:
    """Set of finite sums without witnesses; raises when it grows past `limit`"""
    limit = limit or (1 << Config.FS_LENGTH_CAP)
    sums: set = set()
    for a in reversed(elements):
        sums |= {S.combine(a, s) for s in sums}
        sums.add(a)
        if len(sums) > limit:
            raise PrefixTooLong(f"finite-sums set exceeded {limit} elements")
    return sums


def is_bijective_prefix(prefix: SequencePrefix) -> bool:
    return len(set(prefix.elements)) == len(prefix.elements)


@dataclass(frozen=True)
class PrefixCheck:
    """Outcome of a prefix predicate: holds, or the least violating pair"""

    holds: bool
    violation: Optional[Tuple[IndexSet, IndexSet]] = None
    values: Optional[Dict[int, Element]] = None

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self, S: Semigroup) -> Dict:
        data = {'holds': self.holds}
        if self.violation:
            data['violation'] = [F.to_wire() for F in self.violation]
        if self.values is not None:
            data['values'] = {str(k): S.to_wire(v) for k, v in self.values.items()}
        return data


def _mask_values(prefix: SequencePrefix) -> List[Element]:
    """values[mask] = a_F where bit i-1 of mask marks index i"""
    S = prefix.semigroup
    n = len(prefix)
    values: List[Element] = [None] * (1 << n)
    for mask in range(1, 1 << n):
        top = mask.bit_length() - 1
        rest = mask ^ (1 << top)
        a = prefix.elements[top]
        values[mask] = a if rest == 0 else S.combine(values[rest], a)
    return values


def _shortlex_masks(n: int) -> Iterator[Tuple[int, Witness]]:
    for size in range(1, n + 1):
        for F in combinations(range(1, n + 1), size):
            mask = 0
            for i in F:
                mask |= 1 << (i - 1)
            yield mask, F


def _min_index(mask: int) -> int:
    return (mask & -mask).bit_length()


def is_proper_prefix(prefix: SequencePrefix, cap: Optional[int] = None) -> PrefixCheck:
    """Proper iff a_F1 != a_F2 for all F1 < F2; otherwise the shortlex-least pair"""
    _check_length(prefix, cap)
    n = len(prefix)
    values = _mask_values(prefix)

    # latest possible start of a set with each value
    latest_start: Dict[Element, int] = {}
    for mask in range(1, 1 << n):
        v = values[mask]
        latest_start[v] = max(latest_start.get(v, 0), _min_index(mask))

    for mask, F in _shortlex_masks(n):
        v = values[mask]
        top = F[-1]
        if latest_start[v] <= top:
            continue
        for mask2, G in _shortlex_masks(n - top):
            if values[mask2 << top] == v:
                pair = (IndexSet(F), IndexSet(tuple(i + top for i in G)))
                logger.debug(f"Properness violated by {pair[0]} < {pair[1]}")
                return PrefixCheck(False, pair)
    return PrefixCheck(True)


def _subset_closure(n: int, masks: List[int]) -> np.ndarray:
    """has[m] is True iff some listed mask is a subset of m"""
    has = np.zeros(1 << n, dtype=bool)
    has[np.asarray(masks, dtype=np.int64)] = True
    for b in range(n):
        view = has.reshape(-1, 2, 1 << b)
        view[:, 1, :] |= view[:, 0, :]
    return has


def disjoint_proper_check(prefix: SequencePrefix, cap: Optional[int] = None,
                          scan_limit: int = 256) -> PrefixCheck:
    """Holds iff a_F != a_G for all disjoint nonempty F, G"""
    _check_length(prefix, cap)
    n = len(prefix)
    full = (1 << n) - 1
    values = _mask_values(prefix)

    groups: Dict[Element, List[int]] = {}
    order = list(_shortlex_masks(n))
    for mask, _ in order:
        groups.setdefault(values[mask], []).append(mask)

    common: Dict[Element, int] = {}
    for v, members in groups.items():
        shared = full
        for mask in members:
            shared &= mask
        common[v] = shared

    closures: Dict[Element, np.ndarray] = {}
    for mask, F in order:
        v = values[mask]
        members = groups[v]
        if len(members) < 2 or mask & common[v]:
            continue
        if len(members) > scan_limit:
            if v not in closures:
                closures[v] = _subset_closure(n, members)
            if not closures[v][full ^ mask]:
                continue
        for other in members:
            if not other & mask:
                G = tuple(i + 1 for i in range(n) if other >> i & 1)
                return PrefixCheck(False, (IndexSet(F), IndexSet(G)))
    return PrefixCheck(True)


def length_determined_check(prefix: SequencePrefix, cap: Optional[int] = None) -> PrefixCheck:
    """Holds iff every ordered sum of k >= 2 terms depends only on k"""
    _check_length(prefix, cap)
    n = len(prefix)
    values = _mask_values(prefix)
    by_length: Dict[int, Element] = {}
    first: Dict[int, Witness] = {}

    for mask, F in _shortlex_masks(n):
        k = len(F)
        if k < 2:
            continue
        if k not in by_length:
            by_length[k] = values[mask]
            first[k] = F
        elif values[mask] != by_length[k]:
            return PrefixCheck(False, (IndexSet(first[k]), IndexSet(F)))
    return PrefixCheck(True, values=by_length)


def fs_decomposition_check(prefix: SequencePrefix, split: int, cap: Optional[int] = None) -> bool:
    """FS(a) == FS(head) u FS(tail) u (FS(head) + FS(tail)) for the split after `split`"""
    if not 1 <= split < len(prefix):
        raise InvalidParameter(f"split must lie in 1..{len(prefix) - 1}, got {split}")
    S = prefix.semigroup
    whole = fs_set(prefix, cap).elements
    head = fs_set(prefix.window(1, split), cap).elements
    tail = fs_set(prefix.window(split + 1, len(prefix)), cap).elements
    mixed = {S.combine(h, t) for h in head for t in tail}
    return whole == head | tail | mixed


def extract_sumsequence(prefix: SequencePrefix, targets: Sequence[Element],
                        cap: Optional[int] = None) -> Optional[SumsequencePrefix]:
    """Greedily realize `targets` as a_F1, a_F2, ... over increasing index sets.

    Returns None when some target has no witness after the previous block,
    which at a finite horizon says nothing about longer prefixes.
    """
    cap = cap or Config.FS_LENGTH_CAP
    index_sets: List[IndexSet] = []
    start = 1
    for t in targets:
        if start > len(prefix):
            logger.warning(f"Ran out of prefix after {len(index_sets)} of {len(targets)} targets")
            return None
        window = prefix.window(start, min(len(prefix), start + cap - 1))
        sums = fs_set(window, cap)
        if t not in sums:
            logger.warning(f"No witness for target {t!r} after index {start - 1}")
            return None
        F = sums.witness(t).shifted(start - 1)
        index_sets.append(F)
        start = F.max + 1
    return SumsequencePrefix(prefix, tuple(index_sets))


# -- tail intersections -----------------------------------------------------------

def default_schedule(length: int) -> List[int]:
    """8, 16, 24, 32, 48, 64, 96, 128, ... up to `length`; thirds of it for short prefixes"""
    if length < 24:
        return sorted({-(-length // 3), -(-2 * length // 3), length})
    horizons = [8, 16, 24]
    h = 32
    while h <= length:
        horizons.extend([h, h * 3 // 2])
        h *= 2
    return [H for H in horizons if H <= length]


@dataclass
class HorizonReport:
    """Cumulative windowed tail intersections; `value` is set only when stable"""

    semigroup: Semigroup
    schedule: List[int]
    window_snapshots: List[FrozenSet[Element]]
    snapshots: List[FrozenSet[Element]]
    status: str
    value: Optional[FrozenSet[Element]] = None
    exactness: str = 'at_horizon'

    @property
    def stable(self) -> bool:
        return self.status == 'stable'

    def _wire_set(self, elements: Iterable[Element]) -> List:
        S = self.semigroup
        return [S.to_wire(x) for x in sorted(elements, key=S.rank)]

    def to_json(self) -> Dict:
        return {
            'schedule': list(self.schedule),
            'snapshots': {str(H): self._wire_set(s) for H, s in zip(self.schedule, self.snapshots)},
            'window_snapshots': {str(H): self._wire_set(s)
                                 for H, s in zip(self.schedule, self.window_snapshots)},
            'status': self.status,
            'value': None if self.value is None else self._wire_set(self.value),
            'exactness': self.exactness,
        }


def tail_intersection(prefix: SequencePrefix, schedule: Optional[Sequence[int]] = None,
                      stability: Optional[int] = None) -> HorizonReport:
    """Approximate the intersection of all tail FS sets along a horizon schedule.

    The window set at horizon H is the intersection of FS(a_n..a_H) over
    n <= ceil(H/2); since those sets are nested it equals FS(a_m..a_H) with
    m = ceil(H/2). Snapshots intersect the window sets cumulatively.
    """
    S = prefix.semigroup
    schedule = list(schedule) if schedule else default_schedule(min(len(prefix), Config.TAIL_HORIZON_CAP))
    stability = stability or Config.STABILITY_WINDOW

    if any(H < 1 for H in schedule) or any(a >= b for a, b in zip(schedule, schedule[1:])):
        raise InvalidParameter(f"horizon schedule must be positive and increasing: {schedule}")
    if schedule[-1] > len(prefix):
        raise PrefixTooLong(f"horizon {schedule[-1]} exceeds prefix length {len(prefix)}")
    if schedule[-1] > Config.TAIL_HORIZON_CAP:
        raise PrefixTooLong(f"horizon {schedule[-1]} exceeds the cap {Config.TAIL_HORIZON_CAP}")

    windows: List[FrozenSet[Element]] = []
    snapshots: List[FrozenSet[Element]] = []
    running: Optional[FrozenSet[Element]] = None
    for H in schedule:
        m = -(-H // 2)
        window = frozenset(fs_values(S, prefix.elements[m - 1:H]))
        running = window if running is None else running & window
        windows.append(window)
        snapshots.append(running)

    value = None
    if not snapshots[-1]:
        status = 'empty'
    elif len(snapshots) >= stability and len(set(snapshots[-stability:])) == 1:
        status = 'stable'
        value = snapshots[-1]
    else:
        status = 'unstable'

    logger.info(f"Tail intersection over {S.describe()} at horizons {schedule}: {status}")
    return HorizonReport(S, schedule, windows, snapshots, status, value)
