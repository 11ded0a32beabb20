"""Horizon-bounded constructions: proper subsequences, sumsequence dichotomy,
disjoint IP splits, minimality probes and right-ideal scans.

Every positive result is re-checked by an independent verifier before it is
returned; `ConstructionResult.verified` records that check.
"""

import logging
import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Dict, Iterator, List, Optional, Sequence, Set, Tuple

from src.coloring import mix64
from src.config import Config
from src.errors import (CarrierTooLarge, InvalidParameter, NoStableBaseline, NonEmptyTailIntersection,
                        NotAGroup, NotASubsemigroup, NotDisjointProper, PrefixTooLong, StreamExhausted,
                        TooShort, VerificationFailed)
from src.fs_core import (FsSet, HorizonReport, IndexSet, SequencePrefix, SumsequencePrefix,
                         disjoint_proper_check, fs_set, fs_values, is_bijective_prefix,
                         is_proper_prefix, tail_intersection)
from src.semigroups import Element, Semigroup

logger = logging.getLogger(__name__)


@dataclass
class ConstructionResult:
    kind: str  # proper_prefix | type1 | type2 | inconclusive | disjoint_family | ideal_list | probe_report
    payload: Any
    budget_used: int = 0
    verified: bool = False
    notes: Dict[str, Any] = field(default_factory=dict)

    def to_json(self, S: Semigroup) -> Dict:
        return {
            'kind': self.kind,
            'payload': _payload_json(self.kind, self.payload, S),
            'budget_used': self.budget_used,
            'verified': self.verified,
            'notes': self.notes,
        }


def _wire_set(S: Semigroup, elements) -> List:
    return [S.to_wire(x) for x in sorted(elements, key=S.rank)]


def _payload_json(kind: str, payload: Any, S: Semigroup) -> Any:
    if kind in ('proper_prefix', 'type1', 'type2'):
        return payload.to_json()
    if kind == 'disjoint_family':
        return {
            'classes': [c.to_json() for c in payload['classes']],
            'fs_sets': [fs.to_json() for fs in payload['fs_sets']],
        }
    if kind == 'ideal_list':
        return [{'ideal': _wire_set(S, R), 'maximal_proper': flag} for R, flag in payload]
    if kind == 'probe_report':
        return {
            'baseline': payload['baseline'].to_json(),
            'best': payload['best'].to_json() if payload['best'] else None,
            'witness': payload['witness'].to_json() if payload['witness'] else None,
            'improved': payload['improved'],
        }
    return payload


# -- proper subsequences in groups -----------------------------------------------------

def group_proper_subsequence(G: Semigroup, stream: SequencePrefix, target_len: int) -> ConstructionResult:
    """Greedy proper subsequence: the next stream element b must avoid -A + A for A = FS(chosen) u {0}"""
    if not G.is_group:
        raise NotAGroup(f"{G.describe()} is not a group")
    if not is_bijective_prefix(stream):
        raise InvalidParameter("group construction needs a bijective stream")
    if target_len < 1:
        raise InvalidParameter(f"target length must be >= 1, got {target_len}")
    if target_len > Config.FS_LENGTH_CAP:
        raise PrefixTooLong(f"target length {target_len} exceeds the cap {Config.FS_LENGTH_CAP}")

    A: Set[Element] = {G.identity}
    chosen: List[IndexSet] = []
    checks = 0
    last = 0
    while len(chosen) < target_len:
        for i in range(last + 1, len(stream) + 1):
            b = stream.at(i)
            checks += 1
            # b in -A + A  iff  x + b in A for some x in A
            if any(G.combine(x, b) in A for x in A):
                continue
            chosen.append(IndexSet.of(i))
            A |= {G.combine(x, b) for x in A}
            last = i
            break
        else:
            raise StreamExhausted(f"stream of length {len(stream)} yielded only {len(chosen)} "
                                  f"of {target_len} terms")

    result = SumsequencePrefix(stream, tuple(chosen))
    if not is_proper_prefix(result.as_prefix()):
        raise VerificationFailed("group construction produced a prefix that is not proper")
    logger.info(f"Proper subsequence of length {target_len} in {G.describe()} after {checks} checks")
    return ConstructionResult('proper_prefix', result, checks, True)


def tail_to_proper(S: Semigroup, stream: SequencePrefix, target_len: int,
                   schedule: Optional[Sequence[int]] = None, lookahead: int = 12) -> ConstructionResult:
    """Pick terms whose running FS misses the FS of the next `lookahead` stream terms"""
    if target_len < 1:
        raise InvalidParameter(f"target length must be >= 1, got {target_len}")
    if target_len > Config.FS_LENGTH_CAP:
        raise PrefixTooLong(f"target length {target_len} exceeds the cap {Config.FS_LENGTH_CAP}")
    report = tail_intersection(stream, schedule)
    if report.stable:
        raise NonEmptyTailIntersection(
            f"tail intersection is stable at {sorted(S.to_wire(x) for x in report.value)!r}",
            report.to_json())

    n = len(stream)
    chosen: List[int] = []
    running: Set[Element] = set()
    j = 1
    checks = 0
    while len(chosen) < target_len:
        while j <= n:
            checks += 1
            window = stream.elements[j - 1:min(n, j + lookahead - 1)]
            if not running & fs_values(S, window):
                break
            j += 1
        if j > n:
            raise StreamExhausted(f"stream of length {n} yielded only {len(chosen)} of {target_len} terms")
        b = stream.at(j)
        running |= {S.combine(x, b) for x in running}
        running.add(b)
        chosen.append(j)
        j += 1

    result = SumsequencePrefix.singletons(stream, chosen)
    if not is_proper_prefix(result.as_prefix()):
        raise VerificationFailed(f"lookahead of {lookahead} terms was too short for a proper prefix")
    logger.info(f"Proper subsequence at indices {chosen}")
    return ConstructionResult('proper_prefix', result, checks, True, {'tail_status': report.status})


# -- sumsequence dichotomy -----------------------------------------------------------

def verify_type1(sumsequence: SumsequencePrefix) -> List[str]:
    """b_n + b_m = b_n for all n < m"""
    S = sumsequence.base.semigroup
    b = sumsequence.derived
    return [f"b_{n + 1} + b_{m + 1} != b_{n + 1}"
            for n in range(len(b)) for m in range(n + 1, len(b)) if S.add(b[n], b[m]) != b[n]]


def verify_type2(sumsequence: SumsequencePrefix) -> List[str]:
    """FS(b_1..b_n) and FS(b_1..b_n) + b_(n+1) are disjoint for all n < k"""
    S = sumsequence.base.semigroup
    b = sumsequence.derived
    failures = []
    for n in range(1, len(b)):
        sums = fs_set(SequencePrefix(S, b[:n])).elements
        shifted = {S.add(x, b[n]) for x in sums}
        if sums & shifted:
            failures.append(f"FS(b_1..b_{n}) meets FS(b_1..b_{n}) + b_{n + 1}")
    return failures


class _ChainSearch:
    """Depth-first search over chains F_1 < F_2 < ... in shortlex order of each block"""

    def __init__(self, S: Semigroup, stream: SequencePrefix, k: int, max_block: int, budget: int):
        self.S = S
        self.k = k
        self.budget = budget
        self.nodes = 0
        n = len(stream)
        self.blocks = [(F, S.sum([stream.at(i) for i in F]))
                       for size in range(1, min(max_block, n) + 1)
                       for F in combinations(range(1, n + 1), size)]

    def run(self, accept, grow, state) -> Optional[List[Tuple[int, ...]]]:
        chain: List[Tuple[int, ...]] = []
        values: List[Element] = []

        def search(last: int, state) -> bool:
            for F, b in self.blocks:
                if F[0] <= last:
                    continue
                if self.nodes >= self.budget:
                    return False
                self.nodes += 1
                if not accept(values, state, b):
                    continue
                chain.append(F)
                values.append(b)
                if len(chain) == self.k or search(F[-1], grow(state, b)):
                    return True
                chain.pop()
                values.pop()
            return False

        return list(chain) if search(0, state) else None

    @property
    def exhausted(self) -> bool:
        return self.nodes >= self.budget


def sumsequence_dichotomy(S: Semigroup, stream: SequencePrefix, target_len: int,
                          budget: Optional[int] = None, max_block: Optional[int] = None) -> ConstructionResult:
    """Look for a type 1 sumsequence, then a type 2 one, under one node budget"""
    if target_len < 2:
        raise InvalidParameter(f"target length must be >= 2, got {target_len}")
    budget = budget or Config.DEFAULT_BUDGET
    search = _ChainSearch(S, stream, target_len, max_block or Config.MAX_BLOCK, budget)

    def type1_ok(values, _, b):
        return all(S.combine(x, b) == x for x in values)

    def type2_ok(values, sums, b):
        return not any(S.combine(x, b) in sums for x in sums)

    def type2_grow(sums, b):
        return frozenset(sums | {S.combine(x, b) for x in sums} | {b})

    attempts = (('type1', type1_ok, lambda state, b: state, None, verify_type1),
                ('type2', type2_ok, type2_grow, frozenset(), verify_type2))
    for kind, accept, grow, state, verify in attempts:
        chain = search.run(accept, grow, state)
        if chain is None:
            continue
        result = SumsequencePrefix(stream, tuple(IndexSet(F) for F in chain))
        failures = verify(result)
        if failures:
            logger.error(f"{kind} certificate failed re-verification: {failures}")
            raise VerificationFailed(f"{kind} certificate failed re-verification", failures)
        logger.info(f"{kind} sumsequence of length {target_len} after {search.nodes} nodes")
        return ConstructionResult(kind, result, search.nodes, True)

    reason = 'budget exhausted' if search.exhausted else 'search space exhausted at this horizon'
    logger.warning(f"Dichotomy inconclusive on {S.describe()}: {reason}")
    return ConstructionResult('inconclusive', {'reason': reason, 'blocks': len(search.blocks)},
                              search.nodes, False)


# -- disjoint IP sets ------------------------------------------------------------------

def verify_disjoint_family(S: Semigroup, classes: Sequence[SumsequencePrefix],
                           sets: Sequence[FsSet]) -> List[str]:
    failures = []
    for i, (cls, fs) in enumerate(zip(classes, sets), start=1):
        if not is_bijective_prefix(cls.as_prefix()):
            failures.append(f"class {i} is not bijective")
        if fs_set(cls.as_prefix()).elements != fs.elements:
            failures.append(f"class {i}: recorded FS does not match")
    for i, j in combinations(range(len(sets)), 2):
        if sets[i].elements & sets[j].elements:
            failures.append(f"FS sets {i + 1} and {j + 1} intersect")
    return failures


def split_into_disjoint_ip(S: Semigroup, prefix: SequencePrefix, parts: int) -> ConstructionResult:
    """Residue classes of indices mod `parts` give pairwise disjoint FS sets"""
    if parts < 1:
        raise InvalidParameter(f"parts must be >= 1, got {parts}")
    if len(prefix) < 2 * parts:
        raise TooShort(f"prefix of length {len(prefix)} is too short for {parts} parts")
    check = disjoint_proper_check(prefix)
    if not check:
        F, G = check.violation
        raise NotDisjointProper(f"a_{F} = a_{G} for disjoint index sets",
                                [F.to_wire(), G.to_wire()])

    classes = [SumsequencePrefix.singletons(prefix, range(r, len(prefix) + 1, parts))
               for r in range(1, parts + 1)]
    sets = [fs_set(c.as_prefix()) for c in classes]
    failures = verify_disjoint_family(S, classes, sets)
    if failures:
        raise VerificationFailed("split failed re-verification", failures)
    return ConstructionResult('disjoint_family', {'classes': classes, 'fs_sets': sets}, 0, True)


# -- minimality probe ------------------------------------------------------------------

def _probe_candidates(stream: SequencePrefix, trials: int, seed: int,
                      max_period: int = 6) -> Iterator[Tuple[str, SumsequencePrefix]]:
    n = len(stream)
    for q in range(2, max_period + 1):
        for r in range(1, q + 1):
            if r <= n:
                yield f"indices = {r} mod {q}", SumsequencePrefix.singletons(stream, range(r, n + 1, q))
    for s in (2, 3):
        blocks = [IndexSet(tuple(range(i, i + s))) for i in range(1, n - s + 2, s)]
        if blocks:
            yield f"consecutive blocks of {s}", SumsequencePrefix(stream, tuple(blocks))
    for trial in range(trials):
        rng = random.Random(mix64(seed ^ trial))
        blocks = []
        i = 1 + rng.randrange(3)
        while i <= n:
            size = rng.randint(1, 3)
            if i + size - 1 > n:
                break
            blocks.append(IndexSet(tuple(range(i, i + size))))
            i += size + rng.randrange(3)
        if blocks:
            yield f"random restart {trial}", SumsequencePrefix(stream, tuple(blocks))


def minimality_probe(S: Semigroup, stream: SequencePrefix, trials: int = 16,
                     budget: Optional[int] = None, seed: Optional[int] = None,
                     schedule: Optional[Sequence[int]] = None) -> ConstructionResult:
    """Search sumsequences for a stable tail intersection strictly inside the stream's"""
    budget = budget or Config.DEFAULT_BUDGET
    seed = Config.SEED if seed is None else seed
    baseline = tail_intersection(stream, schedule)
    if not baseline.stable:
        raise NoStableBaseline(f"stream tail intersection is {baseline.status}", baseline.to_json())

    best: Optional[HorizonReport] = None
    witness: Optional[SumsequencePrefix] = None
    tried = 0
    for label, candidate in _probe_candidates(stream, trials, seed):
        if tried >= budget:
            logger.warning(f"Minimality probe stopped after {tried} candidates")
            break
        tried += 1
        derived = candidate.as_prefix()
        if stream.bijective and not is_bijective_prefix(derived):
            continue
        report = tail_intersection(derived)
        if not report.stable or not report.value < baseline.value:
            continue
        if best is None or len(report.value) < len(best.value):
            logger.info(f"Smaller tail intersection of size {len(report.value)} from {label}")
            best, witness = report, candidate

    payload = {'baseline': baseline, 'best': best, 'witness': witness, 'improved': best is not None}
    return ConstructionResult('probe_report', payload, tried, True)


# -- right ideals ------------------------------------------------------------------------

def verify_right_ideals(S: Semigroup, carrier: Sequence[Element], ideals: Sequence) -> List[str]:
    failures = []
    for R, _ in ideals:
        if any(S.add(x, t) not in R for x in R for t in carrier):
            failures.append(f"{_wire_set(S, R)} is not closed under right addition")
    return failures


def right_ideal_scan(S: Semigroup, carrier: Sequence[Element]) -> ConstructionResult:
    """All nonempty R inside a finite subsemigroup T with R + T inside R"""
    T = sorted(set(carrier), key=S.rank)
    if not T:
        raise InvalidParameter("carrier is empty")
    if len(T) > Config.IDEAL_CARRIER_CAP:
        raise CarrierTooLarge(f"carrier of size {len(T)} exceeds {Config.IDEAL_CARRIER_CAP}")
    position = {x: i for i, x in enumerate(T)}
    for x in T:
        for y in T:
            if S.add(x, y) not in position:
                raise NotASubsemigroup(f"{S.to_wire(x)} + {S.to_wire(y)} leaves the carrier")

    # principal[i] = {x} u (x + T) as a bitmask
    principal = []
    for x in T:
        mask = 1 << position[x]
        for t in T:
            mask |= 1 << position[S.combine(x, t)]
        principal.append(mask)

    full = (1 << len(T)) - 1
    closed = [mask for mask in range(1, full + 1)
              if all(principal[i] & ~mask == 0 for i in range(len(T)) if mask >> i & 1)]
    proper = [m for m in closed if m != full]
    ideals = []
    for mask in sorted(closed, key=lambda m: (bin(m).count('1'), [i for i in range(len(T)) if m >> i & 1])):
        maximal = mask != full and not any(other != mask and other & mask == mask for other in proper)
        ideals.append((frozenset(T[i] for i in range(len(T)) if mask >> i & 1), maximal))

    failures = verify_right_ideals(S, T, ideals)
    if failures:
        raise VerificationFailed("right ideal scan failed re-verification", failures)
    logger.info(f"{len(ideals)} right ideals in a carrier of size {len(T)}")
    return ConstructionResult('ideal_list', ideals, len(closed), True)
