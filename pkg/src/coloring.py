"""Finite colorings of enumerable semigroups"""

import json
import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

from src.errors import InvalidParameter
from src.semigroups import Element, Semigroup

logger = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1


def mix64(z: int) -> int:
    """SplitMix64 finalizer on 64-bit words"""
    z = (z + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def rotl64(x: int, k: int) -> int:
    x &= MASK64
    return ((x << k) | (x >> (64 - k))) & MASK64


@dataclass(frozen=True)
class Coloring:
    """Total map from elements to colors 0..colors-1"""

    colors: int

    kind = 'abstract'

    def color(self, S: Semigroup, x: Element) -> int:
        raise NotImplementedError

    def to_json(self, S: Semigroup) -> Dict:
        raise NotImplementedError


@dataclass(frozen=True)
class RankModColoring(Coloring):
    kind = 'rank_mod'

    def color(self, S, x):
        return S.rank(x) % self.colors

    def to_json(self, S):
        return {'kind': self.kind, 'colors': self.colors}


@dataclass(frozen=True)
class SeededRandomColoring(Coloring):
    """color(x) = mix64(rank(x) xor rotl(seed, 32)) mod colors"""

    seed: int = 0
    kind = 'seeded_random'

    def color(self, S, x):
        return mix64(S.rank(x) ^ rotl64(self.seed, 32)) % self.colors

    def to_json(self, S):
        return {'kind': self.kind, 'colors': self.colors, 'seed': self.seed}


@dataclass(frozen=True)
class TableColoring(Coloring):
    """Explicit colors for listed elements, `default` for the rest"""

    entries: Tuple[Tuple[Element, int], ...] = ()
    default: int = 0
    kind = 'table'

    def __post_init__(self):
        if not 0 <= self.default < self.colors:
            raise InvalidParameter(f"default color {self.default} outside 0..{self.colors - 1}")
        if any(not 0 <= c < self.colors for _, c in self.entries):
            raise InvalidParameter(f"table colors must lie in 0..{self.colors - 1}")
        object.__setattr__(self, '_lookup', dict(self.entries))

    def color(self, S, x):
        return self._lookup.get(x, self.default)

    def to_json(self, S):
        return {
            'kind': self.kind,
            'colors': self.colors,
            'default': self.default,
            'entries': [[S.to_wire(x), c] for x, c in self.entries],
        }


@dataclass(frozen=True)
class RecoloredColoring(Coloring):
    """A base coloring with some elements moved to extra colors"""

    base: Optional[Coloring] = None
    overrides: Tuple[Tuple[Element, int], ...] = ()
    kind = 'recolored'

    def __post_init__(self):
        object.__setattr__(self, '_lookup', dict(self.overrides))

    def color(self, S, x):
        if x in self._lookup:
            return self._lookup[x]
        return self.base.color(S, x)

    def with_overrides(self, extra: Dict[Element, int]) -> 'RecoloredColoring':
        merged = dict(self.overrides)
        merged.update(extra)
        return RecoloredColoring(self.colors, self.base, tuple(merged.items()))

    def to_json(self, S):
        return {
            'kind': self.kind,
            'colors': self.colors,
            'base': self.base.to_json(S),
            'overrides': [[S.to_wire(x), c] for x, c in self.overrides],
        }


def fan_center_coloring() -> TableColoring:
    """Center 1 gets color 0, every leaf color 1"""
    return TableColoring(2, entries=((1, 0),), default=1)


def coloring_from_json(data: Dict, S: Semigroup) -> Coloring:
    """Rebuild a coloring serialized by to_json"""
    try:
        kind = data['kind']
        colors = int(data['colors'])
        if colors < 1:
            raise InvalidParameter(f"colorings need at least one color, got {colors}")
        if kind == 'rank_mod':
            return RankModColoring(colors)
        if kind == 'seeded_random':
            return SeededRandomColoring(colors, seed=int(data['seed']))
        if kind == 'table':
            entries = tuple((S.from_wire(w), int(c)) for w, c in data.get('entries', []))
            return TableColoring(colors, entries=entries, default=int(data.get('default', 0)))
        if kind == 'recolored':
            overrides = tuple((S.from_wire(w), int(c)) for w, c in data.get('overrides', []))
            return RecoloredColoring(colors, coloring_from_json(data['base'], S), overrides)
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidParameter(f"malformed coloring: {e}")
    raise InvalidParameter(f"unknown coloring kind {kind!r}")


def parse_coloring(text: str, S: Semigroup) -> Coloring:
    """Command-line coloring: mod:r, random:r:seed, table:path, paper-fan or constant"""
    if text == 'paper-fan':
        return fan_center_coloring()
    if text == 'constant':
        return RankModColoring(1)

    kind, _, rest = text.partition(':')
    try:
        if kind == 'mod':
            return RankModColoring(_color_count(rest))
        if kind == 'random':
            r, _, seed = rest.partition(':')
            return SeededRandomColoring(_color_count(r), seed=int(seed or 0))
        if kind == 'table':
            with open(rest) as f:
                return coloring_from_json({'kind': 'table', **json.load(f)}, S)
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidParameter(f"cannot read coloring table {rest!r}: {e}")
    except ValueError as e:
        raise InvalidParameter(f"bad coloring {text!r}: {e}")
    raise InvalidParameter(f"unknown coloring {text!r}; use mod:r, random:r:seed, table:path, paper-fan or constant")


def _color_count(text: str) -> int:
    r = int(text)
    if r < 1:
        raise InvalidParameter(f"colorings need at least one color, got {r}")
    return r
