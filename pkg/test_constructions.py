#!/usr/bin/env python3
"""Test proper subsequence constructions, the sumsequence dichotomy, splits, probes and right ideals"""

import os
import random
import sys
from itertools import combinations

import pytest

# Add project root to path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from src.cayley import enumerate_finite_semigroups
from src.constructions import (group_proper_subsequence, minimality_probe, right_ideal_scan,
                               split_into_disjoint_ip, sumsequence_dichotomy, tail_to_proper,
                               verify_disjoint_family, verify_type1, verify_type2)
from src.errors import (CarrierTooLarge, InvalidParameter, NoStableBaseline, NonEmptyTailIntersection,
                        NotAGroup, NotASubsemigroup, NotDisjointProper, StreamExhausted, TooShort)
from src.fs_core import IndexSet, SequencePrefix, SumsequencePrefix, is_proper_prefix
from src.semigroups import semigroup

N = semigroup('naturals')


def residues(k, length):
    return SequencePrefix(semigroup('nat_mod_k', k=k), tuple(n % k for n in range(1, length + 1)))


def adversarial_stream(G, rng, length, max_rank):
    """Random distinct elements with planted sums of earlier terms"""
    elements = []
    seen = set()
    while len(elements) < length:
        if len(elements) >= 2 and rng.random() < 0.3:
            x = G.add(rng.choice(elements), rng.choice(elements))
        else:
            x = G.element_at(rng.randrange(1, max_rank))
        if x not in seen and x != G.identity:
            seen.add(x)
            elements.append(x)
    return SequencePrefix(G, tuple(elements), bijective=True)


@pytest.mark.parametrize('p,max_rank', [(2, 1 << 16), (3, 3 ** 13)])
def test_group_proper_subsequence_on_adversarial_streams(p, max_rank):
    G = semigroup('direct_sum_group', p=p)
    rng = random.Random(p)
    for _ in range(100):
        stream = adversarial_stream(G, rng, 150, max_rank)
        result = group_proper_subsequence(G, stream, 12)
        assert result.kind == 'proper_prefix'
        assert result.verified
        assert len(result.payload) == 12
        assert all(len(F) == 1 for F in result.payload.index_sets)
        assert is_proper_prefix(result.payload.as_prefix())


def test_group_proper_subsequence_uses_single_stream_elements():
    G = semigroup('direct_sum_group', p=5)
    e1, e2 = G.unit(1), G.unit(2)
    # e1 - e2 lies in -A + A once e1 and e2 are chosen, and e1 + e2 lies in A
    stream = SequencePrefix(G, (e1, e2, G.add(e1, G.unit(2, 4)), G.add(e1, e2)), bijective=True)
    assert group_proper_subsequence(G, stream, 2).payload.index_sets == (IndexSet.of(1), IndexSet.of(2))
    with pytest.raises(StreamExhausted):
        group_proper_subsequence(G, stream, 3)


def test_group_proper_subsequence_errors():
    G = semigroup('direct_sum_group', p=2)
    with pytest.raises(NotAGroup):
        group_proper_subsequence(N, SequencePrefix.from_stream(N, 10), 3)
    with pytest.raises(InvalidParameter):
        group_proper_subsequence(G, SequencePrefix(G, (G.unit(1), G.unit(1))), 1)
    # ranks 1..15 span only four coordinates
    with pytest.raises(StreamExhausted):
        group_proper_subsequence(G, SequencePrefix.from_stream(G, 16).window(2, 16), 5)


def test_tail_to_proper_on_naturals():
    result = tail_to_proper(N, SequencePrefix.from_stream(N, 64), 6)
    assert result.kind == 'proper_prefix'
    assert [F.min for F in result.payload.index_sets] == [1, 2, 4, 8, 16, 32]
    assert result.notes['tail_status'] == 'empty'


def test_tail_to_proper_refuses_stable_tails():
    with pytest.raises(NonEmptyTailIntersection):
        tail_to_proper(semigroup('nat_mod_k', k=5), residues(5, 48), 3)


def test_dichotomy_left_zero_is_type1():
    L = semigroup('left_zero')
    result = sumsequence_dichotomy(L, SequencePrefix.from_stream(L, 16), 4)
    assert result.kind == 'type1'
    assert result.payload.index_sets == tuple(IndexSet.of(i) for i in (1, 2, 3, 4))
    assert verify_type1(result.payload) == []


def test_dichotomy_powers_of_two_is_type2():
    stream = SequencePrefix(N, tuple(1 << i for i in range(16)))
    result = sumsequence_dichotomy(N, stream, 4)
    assert result.kind == 'type2'
    assert verify_type2(result.payload) == []


def test_dichotomy_fan_is_type1_through_pairs():
    fan = semigroup('fan')
    result = sumsequence_dichotomy(fan, SequencePrefix.from_stream(fan, 16), 4)
    assert result.kind == 'type1'
    assert result.verified
    assert any(len(F) == 2 for F in result.payload.index_sets)
    assert verify_type1(result.payload) == []


def test_dichotomy_budget_is_inconclusive():
    result = sumsequence_dichotomy(N, SequencePrefix.from_stream(N, 16), 4, budget=5)
    assert result.kind == 'inconclusive'
    assert not result.verified
    assert result.payload['reason'] == 'budget exhausted'


def test_split_into_disjoint_ip_sets():
    stream = SequencePrefix(N, (1, 2, 4, 8, 16, 32))
    result = split_into_disjoint_ip(N, stream, 3)
    assert result.kind == 'disjoint_family'
    sets = [fs.elements for fs in result.payload['fs_sets']]
    assert sets == [{1, 8, 9}, {2, 16, 18}, {4, 32, 36}]
    assert verify_disjoint_family(N, result.payload['classes'], result.payload['fs_sets']) == []


def test_split_errors():
    with pytest.raises(TooShort):
        split_into_disjoint_ip(N, SequencePrefix(N, (1, 2, 4, 8, 16)), 3)
    with pytest.raises(NotDisjointProper):
        split_into_disjoint_ip(N, SequencePrefix.from_stream(N, 6), 3)


def test_minimality_probe_finds_smaller_tail():
    result = minimality_probe(semigroup('nat_mod_k', k=4), residues(4, 48))
    assert result.kind == 'probe_report'
    assert result.payload['baseline'].value == {0, 1, 2, 3}
    assert result.payload['improved']
    assert result.payload['best'].value == {0}


def test_minimality_probe_on_multiples_reports_no_improvement():
    stream = residues(5, 60)
    multiples = SumsequencePrefix.singletons(stream, range(5, 61, 5)).as_prefix()
    result = minimality_probe(semigroup('nat_mod_k', k=5), multiples)
    assert result.payload['baseline'].value == {0}
    assert not result.payload['improved']
    assert result.payload['witness'] is None


def test_minimality_probe_needs_stable_baseline():
    with pytest.raises(NoStableBaseline):
        minimality_probe(N, SequencePrefix.from_stream(N, 64))


def test_right_ideals():
    Z5 = semigroup('nat_mod_k', k=5)
    result = right_ideal_scan(Z5, [0])
    assert result.payload == [(frozenset({0}), False)]

    Z4 = semigroup('nat_mod_k', k=4)
    assert right_ideal_scan(Z4, Z4.enumerate(4)).payload == [(frozenset(range(4)), False)]

    L = semigroup('left_zero')
    ideals = right_ideal_scan(L, [1, 2, 3]).payload
    assert len(ideals) == 7
    assert sorted(sorted(R) for R, maximal in ideals if maximal) == [[1, 2], [1, 3], [2, 3]]


def census(max_order):
    for order in range(1, max_order + 1):
        for table in enumerate_finite_semigroups(order):
            yield semigroup('finite_cayley', order=order, table=[v for row in table for v in row])


def test_dichotomy_is_sound_on_small_semigroups():
    kinds = set()
    for S in census(3):
        stream = SequencePrefix(S, tuple(S.element_at(n % S.size) for n in range(1, 9)))
        result = sumsequence_dichotomy(S, stream, 3, budget=5000, max_block=2)
        kinds.add(result.kind)
        if result.kind == 'inconclusive':
            assert not result.verified
            continue
        assert result.kind in ('type1', 'type2')
        blocks = result.payload.index_sets
        assert len(blocks) == 3
        assert all(F.precedes(G) for F, G in zip(blocks, blocks[1:]))
        b = result.payload.derived
        if result.kind == 'type1':
            assert all(S.add(b[n], b[m]) == b[n] for n in range(3) for m in range(n + 1, 3))
            assert verify_type1(result.payload) == []
        else:
            for n in range(1, 3):
                sums = {S.sum([b[i] for i in F]) for size in range(1, n + 1)
                        for F in combinations(range(n), size)}
                assert not sums & {S.add(x, b[n]) for x in sums}
            assert verify_type2(result.payload) == []
    assert 'type1' in kinds


def brute_right_ideals(S, carrier):
    ideals = [frozenset(R) for size in range(1, len(carrier) + 1) for R in combinations(carrier, size)
              if all(S.add(x, t) in R for x in R for t in carrier)]
    full = frozenset(carrier)
    return {R: R != full and not any(R < Q < full for Q in ideals) for R in ideals}


def small_carriers():
    for k in range(1, 9):
        Z = semigroup('nat_mod_k', k=k)
        yield Z, Z.enumerate(k)
    for family in ('left_zero', 'right_zero', 'nat_min', 'nat_max', 'fan'):
        yield semigroup(family), [1, 2, 3, 4, 5]
    T = semigroup('truncated_nat', cap=8)
    yield T, T.enumerate(8)
    for S in census(3):
        yield S, S.enumerate(S.size)


def test_right_ideal_scan_matches_brute_force():
    for S, carrier in small_carriers():
        scanned = right_ideal_scan(S, carrier).payload
        assert len({R for R, _ in scanned}) == len(scanned)
        assert dict(scanned) == brute_right_ideals(S, carrier)


def test_right_ideal_errors():
    with pytest.raises(NotASubsemigroup):
        right_ideal_scan(N, [1, 2])
    Z20 = semigroup('nat_mod_k', k=20)
    with pytest.raises(CarrierTooLarge):
        right_ideal_scan(Z20, Z20.enumerate(17))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, '-v']))
