from fractions import Fraction
from itertools import product
from math import prod

import pytest
from hypothesis import given, settings, strategies as st

from logdeg.partitions import (FormalVector, PairingTable, Partition, PartitionError,
                               PartitionTuple, WeightedPartitionTuple, aut_of, contract_right,
                               diagonal_decomposition, gamma_inverse_check, load_pairing_tables,
                               m_of, nakajima_pairing, partition_count, partition_tuples,
                               partitions_of, sign_of)


def test_partition_invariants_by_hand():
    assert [m_of(Partition((3,))), m_of(Partition((2, 2))), m_of(Partition((1, 1)))] == [3, 4, 1]
    assert [sign_of(Partition((1, 1))), sign_of(Partition((2,)))] == [1, -1]
    assert [aut_of(Partition((1, 1))), aut_of(Partition((2,))),
            aut_of(Partition((2, 2, 1, 1, 1)))] == [2, 1, 12]


def test_partitions_must_be_positive_and_sorted():
    with pytest.raises(PartitionError):
        Partition((1, 0))
    with pytest.raises(PartitionError):
        Partition((1, 2))
    assert Partition.of((1, 3, 2)).parts == (3, 2, 1)


def test_partitions_match_counts():
    for n in range(13):
        ps = partitions_of(n)
        assert len(ps) == partition_count(n)
        assert len(set(ps)) == len(ps) and all(p.size == n for p in ps)
    assert partition_count(10) == 42


def test_basis_count_is_a_product():
    assert len(partition_tuples((2, 3, 4))) == 2 * 3 * 5


def test_diagonal_of_two():
    got = diagonal_decomposition((2,))
    two = PartitionTuple.of((2,))
    ones = PartitionTuple.of((1, 1))
    assert got.terms == {
        (WeightedPartitionTuple(two, "point"), WeightedPartitionTuple(two, "unit")): Fraction(-1, 2),
        (WeightedPartitionTuple(ones, "point"), WeightedPartitionTuple(ones, "unit")): Fraction(1, 2),
    }
    assert str(got) == "-1/2*[(2)[point]⊗(2)[unit]] + 1/2*[(1,1)[point]⊗(1,1)[unit]]"


def test_diagonal_of_one():
    got = diagonal_decomposition((1,))
    assert list(got.terms.values()) == [1]


def test_diagonal_of_one_one():
    got = diagonal_decomposition((1, 1))
    assert len(got.terms) == 1 and list(got.terms.values()) == [1]


SIZES = [s for k in (1, 2, 3) for s in product(range(1, 11), repeat=k)
         if prod(partition_count(n) for n in s) <= 50]


@pytest.mark.parametrize("sizes", SIZES, ids=lambda s: ",".join(map(str, s)))
def test_gamma_inverse(sizes):
    assert gamma_inverse_check(sizes)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 5), min_size=1, max_size=3))
def test_contracting_the_diagonal_is_identity(sizes):
    diag = diagonal_decomposition(sizes)
    for mu in partition_tuples(sizes):
        x = WeightedPartitionTuple(mu, "point")
        assert contract_right(diag, x) == FormalVector({x: 1})


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(1, 4), min_size=1, max_size=4), min_size=1, max_size=3),
       st.lists(st.lists(st.integers(1, 4), min_size=1, max_size=4), min_size=1, max_size=3))
def test_invariants_are_multiplicative(a, b):
    mu, nu = PartitionTuple(tuple(a)), PartitionTuple(tuple(b))
    both = mu + nu
    assert m_of(both) == m_of(mu) * m_of(nu)
    assert sign_of(both) == sign_of(mu) * sign_of(nu)
    assert aut_of(both) == aut_of(mu) * aut_of(nu)
    assert nakajima_pairing(both, both) == nakajima_pairing(mu, mu) * nakajima_pairing(nu, nu)


def test_pairing_vanishes_off_diagonal():
    assert nakajima_pairing(Partition((2,)), Partition((1, 1))) == 0
    assert nakajima_pairing(Partition((2,)), Partition((2,))) == -2


def test_pairing_table_round_trip():
    t = PairingTable(("a", "b"), {("a", "b"): 1, ("b", "a"): 1}, (("a", "b", "1/2"),), "D")
    again = load_pairing_tables(__import__("json").dumps(t.to_json()))
    assert again[0] == t


def test_pairing_table_rejects_unknown_labels():
    with pytest.raises(PartitionError):
        PairingTable(("a",), {("a", "c"): 1}, ())
    with pytest.raises(PartitionError):
        load_pairing_tables('{"labels": ["a"]}')
    with pytest.raises(PartitionError):
        diagonal_decomposition((1, 2), [PairingTable.default()])


def test_custom_table_scales_the_diagonal():
    t = PairingTable(("unit", "point"), {("unit", "point"): 1, ("point", "unit"): 1},
                     (("point", "unit", 3),))
    assert diagonal_decomposition((2,), t) == diagonal_decomposition((2,)).scale(3)
