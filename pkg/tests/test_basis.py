from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spinsep.basis import (MAX_SPINS, BasisState, basis_vector, flip, index_to_pattern,
                           m_table, m_total, pattern_to_index)

UP, DN = 1, -1

# Phi_1 .. Phi_8 for three spins, spin 1 first
PAPER_TABLE = [
    (UP, UP, UP), (DN, UP, UP), (UP, DN, UP), (DN, DN, UP),
    (UP, UP, DN), (DN, UP, DN), (UP, DN, DN), (DN, DN, DN),
]


@pytest.mark.parametrize("k,spins", list(enumerate(PAPER_TABLE, 1)))
def test_three_spin_table(k, spins):
    assert index_to_pattern(k, 3) == BasisState.from_spins(spins)


def test_named_examples():
    assert str(index_to_pattern(1, 3)) == "(↑↑↑)"
    assert str(index_to_pattern(2, 3)) == "(↓↑↑)"
    assert str(index_to_pattern(8, 3)) == "(↓↓↓)"


@pytest.mark.parametrize("k", [0, 9, -1])
def test_index_out_of_range(k):
    with pytest.raises(IndexError):
        index_to_pattern(k, 3)


def test_m_total():
    assert m_total(index_to_pattern(1, 3)) == Fraction(3, 2)
    assert m_total(index_to_pattern(2, 3)) == Fraction(1, 2)
    assert m_total(index_to_pattern(8, 3)) == Fraction(-3, 2)


def test_flip_examples():
    assert flip(BasisState.from_spins((DN, UP, UP)), 1) == BasisState.from_spins((UP, UP, UP))
    assert flip(BasisState.from_spins((UP, UP, UP)), 3) == BasisState.from_spins((UP, UP, DN))
    with pytest.raises(IndexError):
        flip(index_to_pattern(1, 3), 4)
    with pytest.raises(IndexError):
        flip(index_to_pattern(1, 3), 0)


@pytest.mark.parametrize("n", range(1, MAX_SPINS + 1))
def test_bijection_exhaustive(n):
    dim = 1 << n
    words = {index_to_pattern(k, n).word for k in range(1, dim + 1)} if n <= 10 else None
    if words is not None:
        assert len(words) == dim
    # vectorized check of the closed form k = 1 + sum (1 - bit_i) 2^(i-1)
    k = np.arange(1, dim + 1)
    word = ~(k - 1) & (dim - 1)
    bits = (word[:, None] >> np.arange(n)) & 1
    assert np.array_equal(1 + ((1 - bits) << np.arange(n)).sum(axis=1), k)
    assert np.array_equal(np.sort(word), np.arange(dim))


@given(st.integers(1, 12).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, 1 << n))))
def test_round_trip(nk):
    n, k = nk
    assert pattern_to_index(index_to_pattern(k, n)) == k


@given(st.integers(1, 10).flatmap(
    lambda n: st.tuples(st.just(n), st.integers(1, 1 << n), st.integers(1, n))))
def test_flip_properties(nki):
    n, k, i = nki
    s = index_to_pattern(k, n)
    assert flip(flip(s, i), i) == s
    assert abs(m_total(flip(s, i)) - m_total(s)) == 1


def test_m_table_matches_patterns():
    for n in (2, 3, 5):
        table = m_table(n)
        for k in range(1, (1 << n) + 1):
            assert tuple(table[k - 1]) == tuple(float(x) for x in index_to_pattern(k, n).m)
        assert not table.flags.writeable


def test_basis_vector():
    v = basis_vector(2, 3)
    assert v.dtype == np.complex128 and v[1] == 1 and np.count_nonzero(v) == 1
    with pytest.raises(IndexError):
        basis_vector(9, 3)
