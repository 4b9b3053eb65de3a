from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_array_equal

from depthgate.depth_univariate import (brute_ustat_1d, column_counts, pooled_counts,
                                        simplicial1d, simplicial1d_fraction, simplicial1d_many,
                                        tukey1d, tukey1d_fraction, tukey1d_many)
from depthgate.model import DataError

TEN = np.arange(1.0, 11.0)


@pytest.mark.parametrize("x, expected", [(2.5, 0.5), (0.0, 0.0), (1.0, 0.25)])
def test_tukey_examples(x, expected):
    assert tukey1d(x, [1, 2, 3, 4]) == expected


def test_simplicial_order_statistic():
    assert simplicial1d_fraction(TEN[2], TEN) == Fraction(23, 45)
    assert brute_ustat_1d(TEN[2], TEN, exact=True) == Fraction(23, 45)


def test_simplicial_gap_is_shallower():
    inside = simplicial1d_fraction(3.5, TEN)
    assert inside == Fraction(21, 45)
    assert simplicial1d_fraction(3.0, TEN) > inside


@pytest.mark.parametrize("m", range(5, 16))
def test_order_statistic_closed_form(m):
    s = np.sort(np.random.default_rng(m).normal(size=m))
    for i in range(1, m + 1):
        expected = Fraction(m - 1 + (m - i) * (i - 1), comb(m, 2))
        assert simplicial1d_fraction(s[i - 1], s) == expected


def test_simplicial_trivial_cases():
    assert simplicial1d(-1.0, TEN) == 0.0
    assert simplicial1d(0.5, [0.0, 1.0]) == 1.0
    with pytest.raises(DataError):
        brute_ustat_1d(0.0, [1.0])


values = st.lists(st.integers(-5, 5), min_size=2, max_size=30)


@settings(max_examples=60, deadline=None)
@given(values, st.integers(-7, 7))
def test_simplicial_matches_enumeration_with_ties(s, x):
    assert simplicial1d_fraction(x, s) == brute_ustat_1d(x, s, exact=True)


@settings(max_examples=60, deadline=None)
@given(values, st.integers(-7, 7))
def test_tukey_is_min_of_closed_halflines(s, x):
    arr = np.array(s)
    expected = Fraction(min(int((arr <= x).sum()), int((arr >= x).sum())), len(s))
    assert tukey1d_fraction(x, s) == expected


def test_vectorised_forms_agree():
    rng = np.random.default_rng(3)
    s = rng.integers(0, 6, 25).astype(float)
    q = np.linspace(-1, 7, 33)
    assert_array_equal(tukey1d_many(q, s), [tukey1d(x, s) for x in q])
    assert_array_equal(simplicial1d_many(q, s), [simplicial1d(x, s) for x in q])


def test_pooled_counts_brute_force():
    rng = np.random.default_rng(11)
    vals = rng.integers(0, 4, size=(40, 6)).astype(float)
    groups = rng.integers(0, 3, size=40)
    below, above = pooled_counts(vals, groups, 3)
    for g in range(3):
        ref = vals[groups == g]
        for i in range(40):
            assert_array_equal(below[g, i], (ref < vals[i]).sum(axis=0))
            assert_array_equal(above[g, i], (ref > vals[i]).sum(axis=0))


def test_column_counts_with_mask():
    ref = np.array([[0.0, 1.0], [2.0, 3.0], [4.0, 5.0]])
    mask = np.array([[True, True], [True, False], [True, True]])
    below, above = column_counts(ref, np.array([[2.0, 3.0]]), mask)
    assert_array_equal(below, [[1, 1]])
    assert_array_equal(above, [[1, 1]])
