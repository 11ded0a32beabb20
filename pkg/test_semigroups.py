#!/usr/bin/env python3
"""Test semigroup families, ranked enumeration and the Cayley table census"""

import os
import random
import sys

import pytest

# Add project root to path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from src.cayley import check_associative, enumerate_finite_semigroups, normalize_table
from src.errors import ForeignElement, InvalidParameter, NonAssociativeTable, NotAGroup, OrderTooLarge
from src.semigroups import (FAMILIES, SemigroupSpec, Steinberg, construct, right_addition_fibers,
                            semigroup)

SAMPLE_SPECS = [
    ('naturals', {}),
    ('nat_mod_k', {'k': 6}),
    ('fan', {}),
    ('type_c', {}),
    ('steinberg', {}),
    ('left_zero', {}),
    ('right_zero', {}),
    ('nat_min', {}),
    ('nat_max', {}),
    ('truncated_nat', {'cap': 10}),
    ('truncated_nat', {'cap': 10, 'carrier': 'naturals'}),
    ('direct_sum_group', {'p': 3}),
    ('finite_cayley', {'order': 2, 'table': [0, 0, 0, 1]}),
]


def sample(family, params):
    S = semigroup(family, **params)
    return S, S.enumerate(40)


def test_every_family_has_a_sample():
    assert {family for family, _ in SAMPLE_SPECS} == set(FAMILIES)


@pytest.mark.parametrize('family,params', SAMPLE_SPECS)
def test_associativity_on_random_triples(family, params):
    S, elements = sample(family, params)
    rng = random.Random(7)
    for _ in range(100_000):
        x, y, z = (rng.choice(elements) for _ in range(3))
        assert S.add(S.add(x, y), z) == S.add(x, S.add(y, z))


ENUMERATION_GOLDEN = {
    'naturals': [1, 2, 3, 4, 5, 6],
    'nat_mod_k': [0, 1, 2, 3, 4, 5],
    'fan': [1, 2, 3, 4, 5, 6],
    'type_c': [0, (1, 1), (2, 1), (1, 2), (3, 1), (2, 2)],
    'steinberg': [(0, (0,)), (1, ()), (0, (0, 0)), (0, (1,)), (1, (0,)), (2, ())],
    'left_zero': [1, 2, 3, 4, 5, 6],
    'right_zero': [1, 2, 3, 4, 5, 6],
    'nat_min': [1, 2, 3, 4, 5, 6],
    'nat_max': [1, 2, 3, 4, 5, 6],
    'truncated_nat': [1, 2, 3, 4, 5, 6],
    'direct_sum_group': [(), ((1, 1),), ((1, 2),), ((2, 1),), ((1, 1), (2, 1)), ((1, 2), (2, 1))],
    'finite_cayley': [0, 1],
}


@pytest.mark.parametrize('family,params', SAMPLE_SPECS)
def test_enumeration_matches_golden_prefix(family, params):
    first = semigroup(family, **params).enumerate(6)
    assert first == ENUMERATION_GOLDEN[family]
    assert semigroup(family, **params).enumerate(6) == first
    assert len(set(first)) == len(first)


@pytest.mark.parametrize('family,params', SAMPLE_SPECS)
def test_rank_inverts_enumeration(family, params):
    S, elements = sample(family, params)
    assert len(set(elements)) == len(elements)
    for i, x in enumerate(elements):
        assert S.rank(x) == i
        assert S.element_at(i) == x
        assert S.from_wire(S.to_wire(x)) == x


@pytest.mark.parametrize('family,params', SAMPLE_SPECS)
def test_power_is_additive(family, params):
    S, elements = sample(family, params)
    for x in elements[:10]:
        for j in range(1, 5):
            for k in range(1, 5):
                assert S.power(x, j + k) == S.add(S.power(x, j), S.power(x, k))


def test_basic_laws():
    assert semigroup('fan').add(3, 5) == 1
    assert semigroup('fan').add(4, 4) == 4
    assert semigroup('naturals').power(3, 4) == 12
    assert semigroup('nat_mod_k', k=5).power(2, 5) == 0
    assert semigroup('fan').power(7, 3) == 7
    assert semigroup('truncated_nat', cap=10).add(7, 8) == 10
    assert semigroup('left_zero').add(3, 9) == 3
    assert semigroup('right_zero').add(3, 9) == 9

    C = semigroup('type_c')
    assert C.add((2, 1), (2, 3)) == (2, 4)
    assert C.add((1, 1), (2, 1)) == 0
    assert C.add(0, (1, 1)) == 0


def test_enumeration_orders():
    assert semigroup('type_c').enumerate(4) == [0, (1, 1), (2, 1), (1, 2)]
    assert semigroup('steinberg').enumerate(6) == [
        (0, (0,)), (1, ()), (0, (0, 0)), (0, (1,)), (1, (0,)), (2, ())]
    assert semigroup('fan').enumerate(3) == [1, 2, 3]
    assert semigroup('nat_mod_k', k=4).enumerate(10) == [0, 1, 2, 3]


def test_idempotent_power():
    Z6 = semigroup('nat_mod_k', k=6)
    assert Z6.idempotent_power(2) == (1, 3)
    assert Z6.idempotent_of(2) == 0
    assert semigroup('fan').idempotent_power(5) == (1, 1)
    assert semigroup('naturals').idempotent_power(1, bound=100) is None
    assert semigroup('truncated_nat', cap=10).idempotent_of(3) == 10


def test_steinberg_weights_and_counts():
    S = semigroup('steinberg')
    elements = S.enumerate(2 + 4 + 8 + 16)
    weights = [Steinberg.weight(x) for x in elements]
    for w in (1, 2, 3, 4):
        assert weights.count(w) == 1 << w


def test_steinberg_reduction_is_confluent():
    S = semigroup('steinberg')
    rng = random.Random(11)
    letters = ['t', 0, 1, 2, 3]
    for _ in range(500):
        word = [rng.choice(letters) for _ in range(rng.randint(1, 10))]
        left = S.reduce_word(word, 'leftmost')
        right = S.reduce_word(word, 'rightmost')
        assert left == right

        as_elements = [(1, ()) if letter == 't' else (0, (letter,)) for letter in word]
        assert S.sum(as_elements) == left
        assert S.reduce_word(Steinberg.word_of(left)) == left


def test_right_addition_fibers():
    assert right_addition_fibers(semigroup('naturals'), 40)['max_fiber'] == 1
    fibers = right_addition_fibers(semigroup('steinberg'), 60)
    assert 1 <= fibers['max_fiber'] < 60


def test_group_operations():
    G = semigroup('direct_sum_group', p=3)
    for x in G.enumerate(30):
        assert G.add(x, G.negate(x)) == G.identity
    assert G.rank(G.unit(3)) == 9
    assert G.unit(2, 3) == ()

    with pytest.raises(NotAGroup):
        semigroup('fan').negate(2)
    with pytest.raises(NotAGroup):
        semigroup('naturals').identity


def test_foreign_elements_are_rejected():
    with pytest.raises(ForeignElement):
        semigroup('fan').check(0)
    with pytest.raises(ForeignElement):
        semigroup('type_c').from_wire([0, 1])
    with pytest.raises(ForeignElement):
        semigroup('nat_mod_k', k=5).add(2, 5)
    with pytest.raises(ForeignElement):
        semigroup('steinberg').from_wire({'t': 0, 'x': []})


def test_invalid_specs():
    with pytest.raises(InvalidParameter):
        semigroup('direct_sum_group', p=4)
    with pytest.raises(InvalidParameter):
        semigroup('nat_mod_k', k=0)
    with pytest.raises(InvalidParameter):
        semigroup('free_group')
    with pytest.raises(InvalidParameter):
        semigroup('truncated_nat', cap=5, carrier='integers')
    with pytest.raises(InvalidParameter):
        SemigroupSpec.from_dict({'params': {}})


def test_spec_round_trip():
    spec = SemigroupSpec.of('finite_cayley', order=2, table=[[0, 1], [1, 0]])
    data = spec.to_dict()
    assert data == {'family': 'finite_cayley', 'params': {'order': 2, 'table': [0, 1, 1, 0]}}
    S = construct(SemigroupSpec.from_dict(data))
    assert S.is_group
    assert S.identity == 0
    assert S.negate(1) == 1


def test_cayley_tables():
    with pytest.raises(NonAssociativeTable) as info:
        check_associative(normalize_table(2, [1, 0, 0, 0]))
    assert info.value.triple == (0, 0, 1)
    with pytest.raises(InvalidParameter):
        normalize_table(2, [0, 1, 2])


@pytest.mark.parametrize('order,count', [(1, 1), (2, 8), (3, 113)])
def test_labeled_census(order, count):
    tables = list(enumerate_finite_semigroups(order))
    assert len(tables) == count
    assert len(set(tables)) == count
    for table in tables:
        check_associative(table)


def test_census_order_limit():
    with pytest.raises(OrderTooLarge):
        list(enumerate_finite_semigroups(5))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, '-v']))
