"""Finite witnesses for the three forbidden subsemigroup patterns.

    type_a  n distinct elements whose sums s_i + s_j (i = j allowed) fall in a
            cap set of fewer than n elements
    type_b  an idempotent center e and n idempotent leaves with
            leaf + other leaf = e and e absorbing every leaf
    type_c  an idempotent e and generators c_1..c_n with distinct multiples
            up to a bound, cross sums of multiples equal to e, and e absorbing
            every listed multiple

Witnesses list every identity they rely on as (lhs, rhs, value) with
expressions such as "2*c1 + 3*c2", and `verify_forbidden_witness` replays
them from scratch.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Dict, List, Optional, Sequence, Tuple

from src.coloring import mix64
from src.config import Config
from src.errors import InvalidParameter, WitnessFormatError
from src.fs_core import SequencePrefix, SumsequencePrefix, IndexSet, fs_ge2, is_bijective_prefix
from src.semigroups import Element, Semigroup
from src.workers import StratumResult, first_within_budget, map_strata

logger = logging.getLogger(__name__)

# families whose law extends a found pattern to an infinite subsemigroup
EXACT_FAMILIES = {
    'type_a': {'truncated_nat'},
    'type_b': {'fan'},
    'type_c': {'type_c'},
}


@dataclass
class ForbiddenWitness:
    pattern: str
    elements: Dict[str, Element]
    identities: List[Tuple[str, str, Element]] = field(default_factory=list)
    distinct: List[List[str]] = field(default_factory=list)
    exactness: str = 'at_horizon'
    parameters: Dict[str, Any] = field(default_factory=dict)

    def to_json(self, S: Semigroup) -> Dict:
        return {
            'pattern': self.pattern,
            'elements': {name: S.to_wire(x) for name, x in self.elements.items()},
            'identities': [[lhs, rhs, S.to_wire(v)] for lhs, rhs, v in self.identities],
            'distinct': [list(group) for group in self.distinct],
            'exactness': self.exactness,
            'parameters': dict(self.parameters),
        }

    @classmethod
    def from_json(cls, data: Dict, S: Semigroup) -> 'ForbiddenWitness':
        if not isinstance(data, dict) or not isinstance(data.get('elements'), dict):
            raise WitnessFormatError("forbidden witness needs an 'elements' object")
        if not isinstance(data.get('identities'), list):
            raise WitnessFormatError("forbidden witness needs an 'identities' list")
        return cls(
            pattern=data['pattern'],
            elements={name: S.from_wire(w) for name, w in data['elements'].items()},
            identities=[(lhs, rhs, S.from_wire(v)) for lhs, rhs, v in data['identities']],
            distinct=[list(group) for group in data.get('distinct', [])],
            exactness=data.get('exactness', 'at_horizon'),
            parameters=dict(data.get('parameters', {})),
        )


def evaluate(S: Semigroup, expression: str, elements: Dict[str, Element]) -> Element:
    """Evaluate "m*name + name + ..." left to right"""
    total = None
    for term in expression.split('+'):
        term = term.strip()
        count, _, name = term.rpartition('*')
        if name not in elements:
            raise InvalidParameter(f"unknown name {name!r} in {expression!r}")
        value = S.power(elements[name], int(count) if count else 1)
        total = value if total is None else S.add(total, value)
    return total


def _mult(m: int, name: str) -> str:
    return name if m == 1 else f"{m}*{name}"


def verify_forbidden_witness(S: Semigroup, witness: ForbiddenWitness) -> List[str]:
    """Replay every identity and distinctness claim; returns the failed claims"""
    failures = []
    try:
        for x in witness.elements.values():
            S.check(x)
    except Exception as e:
        return [f"element not in {S.describe()}: {e}"]

    for lhs, rhs, value in witness.identities:
        try:
            left = evaluate(S, lhs, witness.elements)
            right = evaluate(S, rhs, witness.elements)
        except Exception as e:
            failures.append(f"{lhs} = {rhs}: {e}")
            continue
        if left != right or left != value:
            failures.append(f"{lhs} = {rhs} does not hold")

    for group in witness.distinct:
        values = [evaluate(S, expr, witness.elements) for expr in group]
        if len(set(values)) != len(values):
            failures.append(f"not pairwise distinct: {', '.join(group)}")

    if witness.pattern == 'type_a':
        members = [n for n in witness.elements if n.startswith('s')]
        caps = [n for n in witness.elements if n.startswith('k')]
        if len(members) <= len(caps):
            failures.append(f"family of {len(members)} does not exceed cap set of {len(caps)}")
        cap_values = {witness.elements[n] for n in caps}
        for a, b in [(a, b) for a in members for b in members]:
            if S.add(witness.elements[a], witness.elements[b]) not in cap_values:
                failures.append(f"{a} + {b} is outside the cap set")
    return failures


def _exactness(S: Semigroup, pattern: str) -> str:
    if S.spec.family not in EXACT_FAMILIES[pattern]:
        return 'at_horizon'
    if pattern == 'type_a' and S.spec.param('carrier', 'finite') != 'naturals':
        return 'at_horizon'
    return 'exact_for_family'


# -- type a ------------------------------------------------------------------------

def _type_a_witness(S: Semigroup, family: List[Element], n: int, c: int) -> ForbiddenWitness:
    caps = sorted({S.add(x, y) for x in family for y in family}, key=S.rank)
    names = {f"s{i}": x for i, x in enumerate(family, start=1)}
    cap_names = {v: f"k{j}" for j, v in enumerate(caps, start=1)}
    elements = {**names, **{name: v for v, name in cap_names.items()}}
    identities = [(f"s{i} + s{j}", cap_names[S.add(x, y)], S.add(x, y))
                  for i, x in enumerate(family, start=1) for j, y in enumerate(family, start=1)]
    return ForbiddenWitness('type_a', elements, identities, [list(names)], _exactness(S, 'type_a'),
                            {'family_size': n, 'cap': c})


def _grow_family(S: Semigroup, pool: Sequence[Element], n: int, c: int) -> Optional[List[Element]]:
    """Greedy in pool order, keeping the sum set within c elements"""
    family: List[Element] = []
    sums: set = set()
    for x in pool:
        extra = {S.combine(x, x)} | {S.combine(x, y) for y in family} | {S.combine(y, x) for y in family}
        if len(sums | extra) <= c:
            family.append(x)
            sums |= extra
            if len(family) == n:
                return family
    return None


def detect_type_a(S: Semigroup, family_size: int, cap: int, horizon: Optional[int] = None,
                  budget: Optional[int] = None, seed: Optional[int] = None) -> Optional[ForbiddenWitness]:
    """n distinct elements among the first `horizon` whose sums take at most `cap` values"""
    n, c = family_size, cap
    if not n > c >= 1:
        raise InvalidParameter(f"type_a needs family_size > cap >= 1 (got {n}, {c})")
    horizon = horizon or Config.DEFAULT_HORIZON
    budget = budget or Config.DEFAULT_BUDGET
    seed = Config.SEED if seed is None else seed

    if S.is_group:
        logger.info(f"type_a refuted: {S.describe()} is a group, so |A + A| >= |A|")
        return None
    elements = S.enumerate(horizon)
    doubles = {S.combine(x, x) for x in elements}
    if len(doubles) == len(elements):
        logger.info(f"type_a refuted at horizon {horizon}: doubling is injective")
        return None

    # bucket by sums against a few probes; members of one family tend to share them
    probes = [elements[mix64(seed + j) % min(16, len(elements))] for j in range(3)]
    buckets: Dict[Tuple, List[Element]] = {}
    for x in elements:
        key = tuple(S.combine(x, p) for p in probes) + (S.combine(x, x),)
        buckets.setdefault(key, []).append(x)

    pools = [pool for pool in buckets.values() if len(pool) >= n] + [elements]
    for pool in pools:
        family = _grow_family(S, pool, n, c)
        if family:
            return _type_a_witness(S, family, n, c)

    nodes = 0
    family: List[Element] = []

    def search(start: int, sums: frozenset) -> bool:
        nonlocal nodes
        for i in range(start, len(elements)):
            if nodes >= budget or len(elements) - i < n - len(family):
                return False
            nodes += 1
            x = elements[i]
            extra = {S.combine(x, x)} | {S.combine(x, y) for y in family} | {S.combine(y, x) for y in family}
            grown = sums | extra
            if len(grown) > c:
                continue
            family.append(x)
            if len(family) == n or search(i + 1, frozenset(grown)):
                return True
            family.pop()
        return False

    if search(0, frozenset()):
        return _type_a_witness(S, family, n, c)
    if nodes >= budget:
        logger.warning(f"type_a search stopped after {budget} nodes")
    return None


# -- types b and c -------------------------------------------------------------------

def _sampled_multiples(B: int, exhaustive: bool) -> List[int]:
    if exhaustive:
        return list(range(1, B + 1))
    return sorted({m for m in (1, 2, 3, B - 1, B) if 1 <= m <= B})


def _clique(members: List[Element], n: int, joined, budget: int) -> Tuple[Optional[List[Element]], int]:
    """Least n-clique in list order under the symmetric relation `joined`"""
    nodes = 0
    chosen: List[Element] = []

    def search(start: int) -> bool:
        nonlocal nodes
        for i in range(start, len(members)):
            if nodes >= budget or len(members) - i < n - len(chosen):
                return False
            nodes += 1
            x = members[i]
            if all(joined(x, y) for y in chosen):
                chosen.append(x)
                if len(chosen) == n or search(i + 1):
                    return True
                chosen.pop()
        return False

    found = search(0)
    return (list(chosen) if found else None), nodes


def _type_b_stratum(args) -> StratumResult:
    S, e, idempotents, n, budget = args
    leaves = [f for f in idempotents if f != e and S.combine(e, f) == e == S.combine(f, e)]
    nodes = len(idempotents)
    if len(leaves) < n:
        return StratumResult(None, nodes, nodes)

    def joined(f, g):
        return S.combine(f, g) == e == S.combine(g, f)

    found, used = _clique(leaves, n, joined, max(budget - nodes, 0))
    value = None if found is None else (e, found)
    return StratumResult(value, nodes + used, nodes + used)


def detect_type_b(S: Semigroup, leaves: int, horizon: Optional[int] = None, budget: Optional[int] = None,
                  workers: Optional[int] = None) -> Optional[ForbiddenWitness]:
    """Idempotent center with `leaves` idempotent leaves pairwise summing to it"""
    if leaves < 2:
        raise InvalidParameter(f"type_b needs at least 2 leaves, got {leaves}")
    horizon = horizon or Config.DEFAULT_HORIZON
    budget = budget or Config.DEFAULT_BUDGET
    idempotents = [x for x in S.enumerate(horizon) if S.combine(x, x) == x]
    if len(idempotents) < leaves + 1:
        logger.info(f"type_b: only {len(idempotents)} idempotents at horizon {horizon}")
        return None

    strata = [(S, e, idempotents, leaves, budget) for e in idempotents]
    value, used, _ = first_within_budget(map_strata(_type_b_stratum, strata, workers), budget)
    if value is None:
        return None

    e, found = value
    names = {'e': e, **{f"e{i}": f for i, f in enumerate(found, start=2)}}
    leaf_names = [name for name in names if name != 'e']
    identities = [('e + e', 'e', e)]
    for name in leaf_names:
        identities += [(f"{name} + {name}", name, names[name]),
                       (f"e + {name}", 'e', e), (f"{name} + e", 'e', e)]
    for a, b in combinations(leaf_names, 2):
        identities += [(f"{a} + {b}", 'e', e), (f"{b} + {a}", 'e', e)]
    return ForbiddenWitness('type_b', names, identities, [list(names)], _exactness(S, 'type_b'),
                            {'leaves': leaves, 'horizon': horizon})


def _type_c_stratum(args) -> StratumResult:
    S, e, elements, n, B, exhaustive, budget = args
    M = _sampled_multiples(B, exhaustive)
    nodes = 0
    candidates = []
    multiples: Dict[Element, List[Element]] = {}
    for c in elements:
        if c == e:
            continue
        nodes += 1
        powers = [c]
        for _ in range(B - 1):
            powers.append(S.combine(powers[-1], c))
        if len(set(powers)) < B or e in powers:
            continue
        if all(S.combine(e, p) == e == S.combine(p, e) for p in powers):
            candidates.append(c)
            multiples[c] = powers
    if len(candidates) < n:
        return StratumResult(None, nodes, nodes)

    def joined(c, d):
        return all(S.combine(multiples[c][m - 1], multiples[d][l - 1]) == e and
                   S.combine(multiples[d][l - 1], multiples[c][m - 1]) == e
                   for m in M for l in M)

    found, used = _clique(candidates, n, joined, max(budget - nodes, 0))
    value = None if found is None else (e, found)
    return StratumResult(value, nodes + used, nodes + used)


def detect_type_c(S: Semigroup, generators: int, multiple_bound: int, horizon: Optional[int] = None,
                  budget: Optional[int] = None, exhaustive: bool = False,
                  workers: Optional[int] = None) -> Optional[ForbiddenWitness]:
    """Idempotent e with generators whose multiples are free up to the bound and cross-sum to e"""
    n, B = generators, multiple_bound
    if n < 2 or B < 2:
        raise InvalidParameter(f"type_c needs generators >= 2 and multiple_bound >= 2 (got {n}, {B})")
    horizon = horizon or Config.DEFAULT_HORIZON
    budget = budget or Config.DEFAULT_BUDGET
    elements = S.enumerate(horizon)
    idempotents = [x for x in elements if S.combine(x, x) == x]
    if not idempotents:
        logger.info(f"type_c: no idempotent at horizon {horizon}")
        return None

    strata = [(S, e, elements, n, B, exhaustive, budget) for e in idempotents]
    value, used, _ = first_within_budget(map_strata(_type_c_stratum, strata, workers), budget)
    if value is None:
        return None

    e, found = value
    M = _sampled_multiples(B, exhaustive)
    names = {'e': e, **{f"c{i}": c for i, c in enumerate(found, start=1)}}
    gens = [name for name in names if name != 'e']
    identities = [('e + e', 'e', e)]
    distinct = []
    for g in gens:
        distinct.append(['e'] + [_mult(m, g) for m in range(1, B + 1)])
        for m in M:
            identities += [(f"e + {_mult(m, g)}", 'e', e), (f"{_mult(m, g)} + e", 'e', e)]
    for a, b in combinations(gens, 2):
        for m in M:
            for l in M:
                identities += [(f"{_mult(m, a)} + {_mult(l, b)}", 'e', e),
                               (f"{_mult(l, b)} + {_mult(m, a)}", 'e', e)]
    return ForbiddenWitness('type_c', names, identities, distinct, _exactness(S, 'type_c'),
                            {'generators': n, 'multiple_bound': B, 'multiples_checked': M,
                             'exhaustive': exhaustive, 'horizon': horizon})


# -- FS>=2 certificates ---------------------------------------------------------------

@dataclass
class Fs2Certificate:
    sumsequence: SumsequencePrefix
    block_size: int
    fs2: frozenset
    stable_upto: int

    @property
    def length(self) -> int:
        return len(self.sumsequence)

    def to_json(self) -> Dict:
        S = self.sumsequence.base.semigroup
        return {
            **self.sumsequence.to_json(),
            'block_size': self.block_size,
            'fs2': [S.to_wire(x) for x in sorted(self.fs2, key=S.rank)],
            'stable_upto': self.stable_upto,
        }


def verify_fs2_certificate(cert: Fs2Certificate) -> List[str]:
    failures = []
    prefix = cert.sumsequence.as_prefix()
    if not is_bijective_prefix(prefix):
        failures.append("certificate prefix is not bijective")
    if fs_ge2(prefix).elements != cert.fs2:
        failures.append("recorded FS>=2 set does not match the full prefix")
    if cert.stable_upto < len(prefix) and \
            fs_ge2(SequencePrefix(prefix.semigroup, prefix.elements[:cert.stable_upto])).elements != cert.fs2:
        failures.append(f"FS>=2 set still grows after length {cert.stable_upto}")
    return failures


def fs2_certificate(S: Semigroup, stream: SequencePrefix, min_len: int = 3,
                    max_len: int = 16) -> Optional[Fs2Certificate]:
    """Consecutive-block sumsequence whose FS>=2 set stops growing before max_len"""
    if min_len < 3:
        raise InvalidParameter(f"min_len must be >= 3, got {min_len}")
    max_len = min(max_len, Config.FS_LENGTH_CAP)
    limit = 1 << Config.FS_LENGTH_CAP

    for s in (1, 2, 3):
        length = min(max_len, len(stream) // s)
        if length <= min_len:
            continue
        blocks = tuple(IndexSet(tuple(range(j * s + 1, j * s + s + 1))) for j in range(length))
        sumsequence = SumsequencePrefix(stream, blocks)
        if not is_bijective_prefix(sumsequence.as_prefix()):
            continue

        sums: set = set()
        ge2: set = set()
        history: List[frozenset] = []
        for b in sumsequence.derived:
            shifted = {S.combine(x, b) for x in sums}
            ge2 |= shifted
            sums |= shifted
            sums.add(b)
            history.append(frozenset(ge2))
            if len(sums) > limit:
                break
        if len(history) < length:
            continue

        final = history[-1]
        stable_upto = next(L for L in range(min_len, length + 1) if history[L - 1] == final)
        if stable_upto < length:
            logger.info(f"FS>=2 of {s}-blocks stable from length {stable_upto} with {len(final)} elements")
            return Fs2Certificate(sumsequence, s, final, stable_upto)
    return None


# -- classification -------------------------------------------------------------------

@dataclass
class ClassifyReport:
    verdict: str
    witnesses: Dict[str, ForbiddenWitness]
    fs2: Optional[Fs2Certificate]
    horizon: int

    def to_json(self, S: Semigroup) -> Dict:
        return {
            'verdict': self.verdict,
            'patterns': list(self.witnesses),
            'witnesses': {p: w.to_json(S) for p, w in self.witnesses.items()},
            'fs2_evidence': self.fs2.to_json() if self.fs2 else None,
            'horizon': self.horizon,
        }


def classify(S: Semigroup, horizon: Optional[int] = None, budget: Optional[int] = None,
             family_size: int = 20, cap: int = 9, leaves: int = 3, generators: int = 3,
             multiple_bound: int = 5, seed: Optional[int] = None,
             workers: Optional[int] = None) -> ClassifyReport:
    """Run all three detectors; FS>=2 stability is reported as evidence only"""
    horizon = horizon or Config.DEFAULT_HORIZON
    found: Dict[str, ForbiddenWitness] = {}
    searches = (
        ('type_a', lambda: detect_type_a(S, family_size, cap, horizon, budget, seed)),
        ('type_b', lambda: detect_type_b(S, leaves, horizon, budget, workers)),
        ('type_c', lambda: detect_type_c(S, generators, multiple_bound, horizon, budget, workers=workers)),
    )
    for pattern, search in searches:
        witness = search()
        if witness is not None:
            failures = verify_forbidden_witness(S, witness)
            if failures:
                logger.error(f"{pattern} witness failed re-verification: {failures}")
                continue
            found[pattern] = witness

    stream = SequencePrefix.from_stream(S, horizon)
    fs2 = fs2_certificate(S, stream) if len(stream) > 3 else None
    verdict = 'OBSTRUCTION_FOUND' if found else 'NO_WITNESS_AT_HORIZON'
    logger.info(f"{S.describe()} at horizon {horizon}: {verdict} {list(found)}")
    return ClassifyReport(verdict, found, fs2, horizon)
