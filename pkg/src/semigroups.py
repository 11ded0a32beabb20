"""Semigroup families with canonical elements and ranked enumeration.

Every family is written additively. Elements are plain hashable Python values
in canonical form, so equality of elements is equality of encodings:

    naturals, nat_min, nat_max, left_zero,
    right_zero, fan, truncated_nat   int >= 1 (fan: 1 is the center)
    nat_mod_k, finite_cayley         int in 0..size-1
    type_c                           0, or a pair (m, n) with m, n >= 1
    steinberg                        (a, (i1, ..., ik)) meaning t^a x_i1 ... x_ik
    direct_sum_group                 sorted ((position, value), ...) with 0 < value < p
"""

import logging
from collections import Counter
from dataclasses import dataclass
from itertools import islice
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

from src.cayley import Table, check_associative, identity_of, is_group_table, normalize_table
from src.config import Config
from src.errors import ForeignElement, InvalidParameter, NotAGroup

logger = logging.getLogger(__name__)

Element = Any

FAMILIES = (
    'naturals', 'nat_mod_k', 'fan', 'type_c', 'steinberg', 'left_zero', 'right_zero',
    'nat_min', 'nat_max', 'truncated_nat', 'direct_sum_group', 'finite_cayley',
)


@dataclass(frozen=True)
class SemigroupSpec:
    """Family name plus parameters, hashable and JSON-friendly"""

    family: str
    params: Tuple[Tuple[str, Any], ...] = ()

    @classmethod
    def of(cls, family: str, **params) -> 'SemigroupSpec':
        if params.get('table') is not None:
            if not _is_int(params.get('order')):
                raise InvalidParameter("finite_cayley needs an integer 'order'")
            params['table'] = normalize_table(params['order'], params['table'])
        return cls(family, tuple(sorted(params.items())))

    def param(self, key: str, default: Any = None) -> Any:
        return dict(self.params).get(key, default)

    def to_dict(self) -> Dict:
        params = {}
        for key, value in self.params:
            if key == 'table':
                value = [v for row in value for v in row]
            params[key] = value
        return {'family': self.family, 'params': params}

    @classmethod
    def from_dict(cls, data: Dict) -> 'SemigroupSpec':
        if not isinstance(data, dict) or 'family' not in data:
            raise InvalidParameter("semigroup spec needs a 'family' key")
        params = data.get('params') or {}
        if not isinstance(params, dict):
            raise InvalidParameter("semigroup spec 'params' must be an object")
        return cls.of(data['family'], **params)


def _is_int(x: Any) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


@dataclass(frozen=True)
class Semigroup:
    """Immutable handle; every operation is a pure function of (spec, arguments)"""

    spec: SemigroupSpec

    is_finite = False
    is_group = False
    has_enumeration = True

    # -- family hooks -------------------------------------------------------

    def _valid(self, x: Element) -> bool:
        raise NotImplementedError

    def _add(self, x: Element, y: Element) -> Element:
        raise NotImplementedError

    def element_at(self, rank: int) -> Element:
        """Element with the given 0-based rank"""
        raise NotImplementedError

    def rank(self, x: Element) -> int:
        """Inverse of element_at"""
        raise NotImplementedError

    @property
    def size(self) -> Optional[int]:
        return None

    def to_wire(self, x: Element) -> Any:
        return x

    def _from_wire(self, obj: Any) -> Element:
        return obj

    # -- shared operations --------------------------------------------------

    def describe(self) -> str:
        params = ', '.join(f"{k}={v}" for k, v in self.spec.params if k != 'table')
        return f"{self.spec.family}({params})" if params else self.spec.family

    def contains(self, x: Element) -> bool:
        try:
            return self._valid(x)
        except (TypeError, ValueError):
            return False

    def check(self, x: Element) -> Element:
        if not self.contains(x):
            raise ForeignElement(f"{x!r} is not an element of {self.describe()}")
        return x

    def add(self, x: Element, y: Element) -> Element:
        return self._add(self.check(x), self.check(y))

    def combine(self, x: Element, y: Element) -> Element:
        """add without validation, for elements already known to be in the carrier"""
        return self._add(x, y)

    def sum(self, elements: Sequence[Element]) -> Element:
        """Left-to-right fold of add"""
        if not elements:
            raise InvalidParameter("cannot sum an empty sequence in a semigroup")
        total = self.check(elements[0])
        for x in elements[1:]:
            total = self._add(total, self.check(x))
        return total

    @property
    def identity(self) -> Element:
        raise NotAGroup(f"{self.describe()} is not a group")

    def _negate(self, x: Element) -> Element:
        raise NotAGroup(f"{self.describe()} is not a group")

    def negate(self, x: Element) -> Element:
        if not self.is_group:
            raise NotAGroup(f"{self.describe()} is not a group")
        return self._negate(self.check(x))

    def iter_elements(self) -> Iterator[Element]:
        rank = 0
        while self.size is None or rank < self.size:
            yield self.element_at(rank)
            rank += 1

    def enumerate(self, n: int) -> List[Element]:
        """First n elements in rank order (fewer when the carrier is smaller)"""
        if n < 1:
            raise InvalidParameter(f"enumerate needs n >= 1, got {n}")
        return list(islice(self.iter_elements(), n))

    def power(self, x: Element, k: int) -> Element:
        """k-fold sum x + ... + x"""
        if k < 1:
            raise InvalidParameter(f"power needs k >= 1, got {k}")
        self.check(x)
        result = None
        base = x
        while k:
            if k & 1:
                result = base if result is None else self._add(result, base)
            k >>= 1
            if k:
                base = self._add(base, base)
        return result

    def is_idempotent(self, x: Element) -> bool:
        return self.add(x, x) == x

    def idempotent_power(self, x: Element, bound: Optional[int] = None) -> Optional[Tuple[int, int]]:
        """(index, period) of the cyclic subsemigroup <x>, if it repeats within bound steps"""
        bound = bound or Config.IDEMPOTENT_BOUND
        self.check(x)
        seen: Dict[Element, int] = {}
        current = x
        for k in range(1, bound + 2):
            if current in seen:
                j = seen[current]
                return j, k - j
            seen[current] = k
            current = self._add(current, x)
        return None

    def idempotent_of(self, x: Element, bound: Optional[int] = None) -> Optional[Element]:
        """The unique idempotent m*x of <x>, when <x> is finite within bound"""
        cycle = self.idempotent_power(x, bound)
        if cycle is None:
            return None
        index, period = cycle
        m = period * -(-index // period)
        return self.power(x, m)

    def from_wire(self, obj: Any) -> Element:
        try:
            x = self._from_wire(obj)
        except (TypeError, ValueError, KeyError, IndexError) as e:
            raise ForeignElement(f"bad wire form {obj!r} for {self.describe()}: {e}")
        return self.check(x)


# -- carriers {1, 2, 3, ...} -------------------------------------------------

@dataclass(frozen=True)
class _PositiveCarrier(Semigroup):

    def _valid(self, x: Element) -> bool:
        return _is_int(x) and x >= 1

    def element_at(self, rank: int) -> Element:
        return rank + 1

    def rank(self, x: Element) -> int:
        return self.check(x) - 1


@dataclass(frozen=True)
class Naturals(_PositiveCarrier):
    def _add(self, x, y):
        return x + y


@dataclass(frozen=True)
class LeftZero(_PositiveCarrier):
    def _add(self, x, y):
        return x


@dataclass(frozen=True)
class RightZero(_PositiveCarrier):
    def _add(self, x, y):
        return y


@dataclass(frozen=True)
class NatMin(_PositiveCarrier):
    def _add(self, x, y):
        return min(x, y)


@dataclass(frozen=True)
class NatMax(_PositiveCarrier):
    def _add(self, x, y):
        return max(x, y)


@dataclass(frozen=True)
class FanSemilattice(_PositiveCarrier):
    """m + n := 1 for distinct m, n; every element idempotent, 1 is the center"""

    def _add(self, x, y):
        return x if x == y else 1


@dataclass(frozen=True)
class TruncatedNat(_PositiveCarrier):
    """x + y := min(x + y, cap), on {1..cap} or on all of N"""

    cap: int = 1
    unbounded: bool = False

    @property
    def size(self) -> Optional[int]:
        return None if self.unbounded else self.cap

    @property
    def is_finite(self) -> bool:
        return not self.unbounded

    def _valid(self, x: Element) -> bool:
        return _is_int(x) and x >= 1 and (self.unbounded or x <= self.cap)

    def _add(self, x, y):
        return min(x + y, self.cap)


# -- cyclic groups -------------------------------------------------------------

@dataclass(frozen=True)
class NatModK(Semigroup):
    """{0..k-1} with addition modulo k"""

    k: int = 1
    is_finite = True
    is_group = True

    @property
    def size(self) -> Optional[int]:
        return self.k

    @property
    def identity(self) -> Element:
        return 0

    def _valid(self, x):
        return _is_int(x) and 0 <= x < self.k

    def _add(self, x, y):
        return (x + y) % self.k

    def _negate(self, x):
        return (-x) % self.k

    def element_at(self, rank):
        return rank

    def rank(self, x):
        return self.check(x)


# -- type (c): (N x N) u {0} ------------------------------------------------------

@dataclass(frozen=True)
class TypeC(Semigroup):
    """(m, n1) + (m, n2) := (m, n1 + n2); every other sum is the zero 0"""

    def _valid(self, x):
        if _is_int(x):
            return x == 0
        return (isinstance(x, tuple) and len(x) == 2
                and all(_is_int(v) and v >= 1 for v in x))

    def _add(self, x, y):
        if x == 0 or y == 0 or x[0] != y[0]:
            return 0
        return (x[0], x[1] + y[1])

    def element_at(self, rank):
        if rank == 0:
            return 0
        idx = rank - 1
        d = 2
        while idx >= d - 1:
            idx -= d - 1
            d += 1
        n = idx + 1
        return (d - n, n)

    def rank(self, x):
        self.check(x)
        if x == 0:
            return 0
        m, n = x
        d = m + n
        return 1 + (d - 1) * (d - 2) // 2 + (n - 1)

    def to_wire(self, x):
        return '0' if x == 0 else [x[0], x[1]]

    def _from_wire(self, obj):
        if obj == '0' or obj == 0:
            return 0
        m, n = obj
        return (m, n)


# -- Steinberg's presented semigroup ------------------------------------------------

def _compositions(m: int) -> Iterator[Tuple[int, ...]]:
    """Compositions of m in lexicographic order"""
    for c in range(1, m + 1):
        if c == m:
            yield (m,)
        else:
            for rest in _compositions(m - c):
                yield (c,) + rest


def _composition_count(m: int) -> int:
    return 1 if m == 0 else 1 << (m - 1)


@dataclass(frozen=True)
class Steinberg(Semigroup):
    """< t, x0, x1, ... : x0 + t = x0, x_i + t = x_(i-1) >, normal forms t^a x_i1 ... x_ik"""

    @staticmethod
    def weight(x: Element) -> int:
        a, xs = x
        return a + sum(i + 1 for i in xs)

    def _valid(self, x):
        if not (isinstance(x, tuple) and len(x) == 2):
            return False
        a, xs = x
        return (_is_int(a) and a >= 0 and isinstance(xs, tuple)
                and all(_is_int(i) and i >= 0 for i in xs) and (a > 0 or len(xs) > 0))

    def _add(self, x, y):
        a1, xs1 = x
        a2, xs2 = y
        if not xs1:
            return (a1 + a2, xs2)
        last = max(xs1[-1] - a2, 0)
        return (a1, xs1[:-1] + (last,) + xs2)

    def iter_elements(self):
        w = 1
        while True:
            for a in range(w + 1):
                m = w - a
                if m == 0:
                    yield (a, ())
                    continue
                for parts in _compositions(m):
                    yield (a, tuple(p - 1 for p in parts))
            w += 1

    def element_at(self, rank):
        w = 1
        while rank >= (1 << w):
            rank -= 1 << w
            w += 1
        for a in range(w + 1):
            count = _composition_count(w - a)
            if rank < count:
                return (a, self._unrank_composition(w - a, rank))
            rank -= count
        raise IndexError(rank)

    @staticmethod
    def _unrank_composition(m: int, j: int) -> Tuple[int, ...]:
        xs = []
        while m > 0:
            for c in range(1, m + 1):
                count = _composition_count(m - c)
                if j < count:
                    xs.append(c - 1)
                    m -= c
                    break
                j -= count
        return tuple(xs)

    def rank(self, x):
        self.check(x)
        a, xs = x
        w = self.weight(x)
        rank = (1 << w) - 2
        rank += sum(_composition_count(w - b) for b in range(a))
        m = w - a
        for i in xs:
            c = i + 1
            rank += sum(_composition_count(m - c2) for c2 in range(1, c))
            m -= c
        return rank

    def to_wire(self, x):
        return {'t': x[0], 'x': list(x[1])}

    def _from_wire(self, obj):
        return (obj['t'], tuple(obj['x']))

    @staticmethod
    def word_of(x: Element) -> List[Any]:
        """Letters of the normal form: 't' for t, an int i for x_i"""
        a, xs = x
        return ['t'] * a + list(xs)

    def reduce_word(self, word: Sequence[Any], strategy: str = 'leftmost') -> Element:
        """Rewrite x_i t -> x_(i-1) and x_0 t -> x_0 until no rule applies"""
        if not word:
            raise InvalidParameter("empty word")
        letters = list(word)
        while True:
            spots = [i for i in range(len(letters) - 1)
                     if letters[i] != 't' and letters[i + 1] == 't']
            if not spots:
                break
            i = spots[0] if strategy == 'leftmost' else spots[-1]
            letters[i:i + 2] = [max(letters[i] - 1, 0)]
        a = 0
        while a < len(letters) and letters[a] == 't':
            a += 1
        return self.check((a, tuple(letters[a:])))


# -- infinite periodic group ---------------------------------------------------

@dataclass(frozen=True)
class DirectSumGroup(Semigroup):
    """Direct sum of countably many copies of Z/p, finitely supported vectors"""

    p: int = 2
    is_group = True

    @property
    def identity(self) -> Element:
        return ()

    def _valid(self, x):
        if not isinstance(x, tuple):
            return False
        last = 0
        for entry in x:
            if not (isinstance(entry, tuple) and len(entry) == 2):
                return False
            pos, val = entry
            if not (_is_int(pos) and _is_int(val) and pos > last and 0 < val < self.p):
                return False
            last = pos
        return True

    def _add(self, x, y):
        merged = dict(x)
        for pos, val in y:
            merged[pos] = (merged.get(pos, 0) + val) % self.p
        return tuple(sorted((pos, val) for pos, val in merged.items() if val))

    def _negate(self, x):
        return tuple((pos, self.p - val) for pos, val in x)

    def element_at(self, rank):
        entries = []
        pos = 1
        while rank:
            rank, digit = divmod(rank, self.p)
            if digit:
                entries.append((pos, digit))
            pos += 1
        return tuple(entries)

    def rank(self, x):
        return sum(val * self.p ** (pos - 1) for pos, val in self.check(x))

    def unit(self, position: int, value: int = 1) -> Element:
        """value * e_position"""
        return self.check(((position, value % self.p),)) if value % self.p else ()

    def to_wire(self, x):
        return [[pos, val] for pos, val in x]

    def _from_wire(self, obj):
        return tuple((pos, val) for pos, val in obj)


# -- finite Cayley tables --------------------------------------------------------

@dataclass(frozen=True)
class FiniteCayley(Semigroup):

    table: Table = ()
    is_finite = True

    @property
    def size(self) -> Optional[int]:
        return len(self.table)

    @property
    def is_group(self) -> bool:
        return is_group_table(self.table)

    @property
    def identity(self) -> Element:
        e = identity_of(self.table)
        if e is None or not self.is_group:
            raise NotAGroup(f"{self.describe()} is not a group")
        return e

    def _valid(self, x):
        return _is_int(x) and 0 <= x < len(self.table)

    def _add(self, x, y):
        return self.table[x][y]

    def _negate(self, x):
        e = self.identity
        for y in range(len(self.table)):
            if self.table[x][y] == e == self.table[y][x]:
                return y
        raise NotAGroup(f"{x} has no inverse")

    def element_at(self, rank):
        return rank

    def rank(self, x):
        return self.check(x)


# -- construction ----------------------------------------------------------------

def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, int(p ** 0.5) + 1))


def _positive_param(spec: SemigroupSpec, key: str) -> int:
    value = spec.param(key)
    if not _is_int(value) or value < 1:
        raise InvalidParameter(f"{spec.family} needs integer parameter {key} >= 1, got {value!r}")
    return value


def _build_truncated(spec: SemigroupSpec) -> Semigroup:
    carrier = spec.param('carrier', 'finite')
    if carrier not in ('finite', 'naturals'):
        raise InvalidParameter(f"truncated_nat carrier must be 'finite' or 'naturals', got {carrier!r}")
    return TruncatedNat(spec, cap=_positive_param(spec, 'cap'), unbounded=carrier == 'naturals')


def _build_direct_sum(spec: SemigroupSpec) -> Semigroup:
    p = spec.param('p')
    if not _is_int(p) or not _is_prime(p):
        raise InvalidParameter(f"direct_sum_group needs a prime p, got {p!r}")
    return DirectSumGroup(spec, p=p)


def _build_cayley(spec: SemigroupSpec) -> Semigroup:
    order = _positive_param(spec, 'order')
    table = spec.param('table')
    if table is None:
        raise InvalidParameter("finite_cayley needs a table")
    table = normalize_table(order, table)
    check_associative(table)
    return FiniteCayley(spec, table=table)


_BUILDERS = {
    'naturals': Naturals,
    'left_zero': LeftZero,
    'right_zero': RightZero,
    'nat_min': NatMin,
    'nat_max': NatMax,
    'fan': FanSemilattice,
    'type_c': TypeC,
    'steinberg': Steinberg,
    'nat_mod_k': lambda spec: NatModK(spec, k=_positive_param(spec, 'k')),
    'truncated_nat': _build_truncated,
    'direct_sum_group': _build_direct_sum,
    'finite_cayley': _build_cayley,
}


def construct(spec: SemigroupSpec) -> Semigroup:
    """Build the handle for a spec, validating parameters"""
    builder = _BUILDERS.get(spec.family)
    if builder is None:
        raise InvalidParameter(f"unknown family {spec.family!r}; expected one of {', '.join(FAMILIES)}")
    handle = builder(spec)
    logger.debug(f"Constructed {handle.describe()}")
    return handle


def semigroup(family: str, **params) -> Semigroup:
    """Shorthand: construct(SemigroupSpec.of(family, **params))"""
    return construct(SemigroupSpec.of(family, **params))


def right_addition_fibers(S: Semigroup, horizon: int) -> Dict[str, Any]:
    """Largest fiber |{x : x + s = y}| over the first `horizon` elements"""
    elements = S.enumerate(horizon)
    worst = {'max_fiber': 0, 's': None, 'y': None}
    for s in elements:
        counts = Counter(S.add(x, s) for x in elements)
        y, size = counts.most_common(1)[0]
        if size > worst['max_fiber']:
            worst = {'max_fiber': size, 's': s, 'y': y}
    logger.info(f"{S.describe()}: largest right-addition fiber at horizon {horizon} is {worst['max_fiber']}")
    return worst
