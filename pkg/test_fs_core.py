#!/usr/bin/env python3
"""Test index sets, finite-sums sets, properness predicates and tail intersections"""

import os
import random
import sys
from itertools import product

import pytest

# Add project root to path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from src.cayley import enumerate_finite_semigroups
from src.errors import IndexOutOfRange, InvalidParameter, PrefixTooLong, VerificationFailed
from src.fs_core import (IndexSet, SequencePrefix, SumsequencePrefix, default_schedule,
                         disjoint_proper_check, extract_sumsequence, fs_decomposition_check, fs_ge2,
                         fs_set, is_bijective_prefix, is_proper_prefix, length_determined_check,
                         naive_fs_set, sum_over, tail_intersection)
from src.semigroups import semigroup

N = semigroup('naturals')
FAN = semigroup('fan')
Z5 = semigroup('nat_mod_k', k=5)


def prefix(S, *elements):
    return SequencePrefix(S, elements)


def residues(k, length):
    """a_n = n mod k for n = 1..length"""
    return SequencePrefix(semigroup('nat_mod_k', k=k), tuple(n % k for n in range(1, length + 1)))


def test_index_sets():
    F, G = IndexSet.of(1, 3), IndexSet.of(4, 6)
    assert F.precedes(G) and not G.precedes(F)
    assert F.disjoint(G)
    assert not IndexSet.of(1, 4).precedes(IndexSet.of(3, 5))
    assert str(F) == '{1,3}'
    assert F.shifted(2) == IndexSet.of(3, 5)
    with pytest.raises(InvalidParameter):
        IndexSet.of(3, 2)
    with pytest.raises(InvalidParameter):
        IndexSet(())
    with pytest.raises(InvalidParameter):
        IndexSet.of(0, 1)


def test_sum_over_folds_left_to_right():
    R = semigroup('right_zero')
    p = prefix(R, 4, 5, 6)
    assert sum_over(p, IndexSet.of(1, 2, 3)) == 6
    assert sum_over(prefix(semigroup('left_zero'), 4, 5, 6), IndexSet.of(2, 3)) == 5
    with pytest.raises(IndexOutOfRange):
        sum_over(p, IndexSet.of(4))
    with pytest.raises(IndexOutOfRange):
        p.at(0)


def test_fs_sets_on_naturals():
    p = prefix(N, 1, 2, 4)
    sums = fs_set(p)
    assert sums.elements == frozenset(range(1, 8))
    assert sums.witness(3) == IndexSet.of(1, 2)
    assert sums.witness(7) == IndexSet.of(1, 2, 3)
    assert fs_ge2(p).elements == {3, 5, 6, 7}


def test_fs_set_keeps_least_witness():
    # 3 = a_1 + a_2 = a_3; the least witness is {1,2}
    sums = fs_set(prefix(N, 1, 2, 3))
    assert sums.witness(3) == IndexSet.of(1, 2)
    assert fs_set(prefix(FAN, 2, 3, 4)).witness(1) == IndexSet.of(1, 2)


@pytest.mark.parametrize('family,params', [
    ('naturals', {}), ('fan', {}), ('type_c', {}), ('steinberg', {}),
    ('nat_mod_k', {'k': 7}), ('right_zero', {}), ('direct_sum_group', {'p': 2}),
])
def test_fs_set_matches_brute_force(family, params):
    S = semigroup(family, **params)
    pool = S.enumerate(12)
    rng = random.Random(3)
    for _ in range(20):
        elements = tuple(rng.choice(pool) for _ in range(rng.randint(1, 8)))
        p = SequencePrefix(S, elements)
        fast, slow = fs_set(p), naive_fs_set(p)
        assert fast.witnesses == slow.witnesses
        assert fs_ge2(p).elements <= fast.elements


def test_length_cap():
    with pytest.raises(PrefixTooLong):
        fs_set(SequencePrefix.from_stream(N, 23))
    with pytest.raises(PrefixTooLong):
        is_proper_prefix(SequencePrefix.from_stream(N, 23))


def test_proper_prefixes():
    check = is_proper_prefix(prefix(N, 1, 2, 3))
    assert not check
    assert check.violation == (IndexSet.of(1, 2), IndexSet.of(3))

    check = is_proper_prefix(prefix(FAN, 2, 3, 4, 1))
    assert check.violation == (IndexSet.of(1, 2), IndexSet.of(4))

    assert is_proper_prefix(prefix(N, 1, 2, 4, 8, 16))
    assert is_proper_prefix(prefix(N, 5))
    assert not is_proper_prefix(prefix(N, 3, 3))


def test_bijective_prefixes():
    assert is_bijective_prefix(prefix(N, 1, 2, 3))
    assert not is_bijective_prefix(prefix(FAN, 1, 2, 1))
    with pytest.raises(InvalidParameter):
        SequencePrefix(N, (1, 1), bijective=True)
    with pytest.raises(InvalidParameter):
        SequencePrefix(N, ())


def test_disjoint_proper():
    check = disjoint_proper_check(prefix(FAN, 2, 3, 4, 5))
    assert check.violation == (IndexSet.of(1, 2), IndexSet.of(3, 4))
    assert disjoint_proper_check(prefix(N, 1, 2, 4, 8, 16, 32))
    assert not disjoint_proper_check(prefix(N, 1, 2, 3))


def test_disjoint_proper_large_groups():
    # every sum of two or more terms is 1, so value groups are large
    p = SequencePrefix.from_stream(FAN, 12).window(2, 12)
    check = disjoint_proper_check(p, scan_limit=8)
    assert check.violation == (IndexSet.of(1, 2), IndexSet.of(3, 4))
    assert disjoint_proper_check(SequencePrefix(N, tuple(1 << i for i in range(12))), scan_limit=8)


def test_length_determined():
    check = length_determined_check(prefix(FAN, 2, 3, 4, 5))
    assert check.holds
    assert check.values == {2: 1, 3: 1, 4: 1}

    check = length_determined_check(prefix(N, 1, 2, 3))
    assert check.violation == (IndexSet.of(1, 2), IndexSet.of(1, 3))


def test_fs_decomposition_property():
    specs = [('naturals', {}), ('fan', {}), ('type_c', {}), ('steinberg', {}), ('nat_mod_k', {'k': 6}),
             ('left_zero', {}), ('direct_sum_group', {'p': 3}), ('truncated_nat', {'cap': 10})]
    handles = [semigroup(family, **params) for family, params in specs]
    rng = random.Random(20240601)
    failures = 0
    for _ in range(1000):
        S = rng.choice(handles)
        pool = S.enumerate(15)
        length = rng.randint(2, 12)
        p = SequencePrefix(S, tuple(rng.choice(pool) for _ in range(length)))
        if not fs_decomposition_check(p, rng.randint(1, length - 1)):
            failures += 1
    assert failures == 0

    with pytest.raises(InvalidParameter):
        fs_decomposition_check(prefix(N, 1, 2), 2)


def test_sumsequences():
    base = SequencePrefix.from_stream(N, 10)
    s = SumsequencePrefix(base, (IndexSet.of(1, 2), IndexSet.of(4), IndexSet.of(5, 9)))
    assert s.derived == (3, 4, 14)
    assert s.as_prefix().elements == (3, 4, 14)
    with pytest.raises(InvalidParameter):
        SumsequencePrefix(base, (IndexSet.of(1, 3), IndexSet.of(2)))
    with pytest.raises(VerificationFailed):
        SumsequencePrefix(base, (IndexSet.of(1),), derived=(2,))


def test_extract_sumsequence():
    base = SequencePrefix.from_stream(N, 8)
    s = extract_sumsequence(base, [3, 9])
    assert s.index_sets == (IndexSet.of(1, 2), IndexSet.of(3, 6))
    assert extract_sumsequence(base, [100]) is None
    assert extract_sumsequence(base, [36, 1]) is None


def test_default_schedule():
    assert default_schedule(12) == [4, 8, 12]
    assert default_schedule(64) == [8, 16, 24, 32, 48, 64]
    assert default_schedule(100) == [8, 16, 24, 32, 48, 64, 96]


def test_tail_intersection_of_multiples_is_zero():
    stream = residues(5, 60)
    multiples = SumsequencePrefix.singletons(stream, range(5, 61, 5))
    report = tail_intersection(multiples.as_prefix())
    assert report.status == 'stable'
    assert report.value == {0}
    assert report.schedule == [4, 8, 12]


def test_tail_intersection_of_residue_stream():
    report = tail_intersection(residues(5, 48))
    assert report.stable
    assert report.value == set(range(5))


def test_tail_intersection_empty_on_naturals():
    report = tail_intersection(SequencePrefix.from_stream(N, 64))
    assert report.status == 'empty'
    assert report.value is None
    # snapshots only shrink
    for earlier, later in zip(report.snapshots, report.snapshots[1:]):
        assert later <= earlier
    assert report.to_json()['snapshots']['64'] == []


def test_tail_intersection_bad_schedules():
    stream = SequencePrefix.from_stream(N, 20)
    with pytest.raises(InvalidParameter):
        tail_intersection(stream, [8, 4])
    with pytest.raises(PrefixTooLong):
        tail_intersection(stream, [8, 30])


def test_fs_of_powers_of_two_is_full():
    for n in range(1, 17):
        sums = fs_set(SequencePrefix(N, tuple(1 << i for i in range(n))))
        assert len(sums.elements) == (1 << n) - 1
        assert sums.elements == frozenset(range(1, 1 << n))


@pytest.mark.parametrize('family,params', [
    ('naturals', {}), ('fan', {}), ('type_c', {}), ('nat_mod_k', {'k': 5}),
    ('left_zero', {}), ('direct_sum_group', {'p': 2}), ('nat_max', {}),
])
def test_properness_implications(family, params):
    S = semigroup(family, **params)
    pool = S.enumerate(8)
    rng = random.Random(17)
    seen = {'proper': 0, 'disjoint': 0}
    for _ in range(300):
        length = rng.randint(1, 7)
        p = SequencePrefix(S, tuple(rng.choice(pool) for _ in range(length)))
        assert len(fs_set(p).elements) <= (1 << length) - 1
        if is_proper_prefix(p):
            seen['proper'] += 1
            assert is_bijective_prefix(p)
        if disjoint_proper_check(p):
            seen['disjoint'] += 1
            assert is_proper_prefix(p)
    # singletons are always disjoint-proper
    assert seen['disjoint'] >= 1 and seen['proper'] >= seen['disjoint']


def eventually_periodic(order, max_period=3):
    for pre_len in (0, 1):
        for q in range(1, max_period + 1):
            for pre in product(range(order), repeat=pre_len):
                for period in product(range(order), repeat=q):
                    yield pre, period


@pytest.mark.parametrize('order', [1, 2, 3])
def test_stable_tail_intersections_are_subsemigroups(order):
    length, schedule = 64, [24, 32, 48, 64]
    checked = 0
    for table in enumerate_finite_semigroups(order):
        S = semigroup('finite_cayley', order=order, table=[v for row in table for v in row])
        for pre, period in eventually_periodic(order):
            terms = tuple(pre[n] if n < len(pre) else period[(n - len(pre)) % len(period)]
                          for n in range(length))
            report = tail_intersection(SequencePrefix(S, terms), schedule)
            if not report.stable:
                continue
            checked += 1
            assert report.value
            assert all(S.add(x, y) in report.value for x in report.value for y in report.value)
    assert checked > 0


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, '-v']))
