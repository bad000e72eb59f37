from fractions import Fraction

import pytest

import orbitdepth.words as wd
from orbitdepth.series import NCSeries, TruncationContext, SeriesError, log_magnus
from orbitdepth.echelon import SparseEchelon, FilteredSubspace, span_add, subspace_contains

CTX = TruncationContext(2, 3)


def test_sparse_echelon_basic():
    e = SparseEchelon()
    assert e.add({0: Fraction(2), 1: Fraction(4)})
    assert not e.add({0: Fraction(1), 1: Fraction(2)})
    assert e.add({1: Fraction(1)})
    assert len(e) == 2
    # rows are pivot-normalized and mutually reduced
    assert e.rows[0] == {0: Fraction(1)}
    assert e.rows[1] == {1: Fraction(1)}


def test_sparse_echelon_contains():
    e = SparseEchelon()
    e.add({0: Fraction(1), 2: Fraction(1)})
    e.add({1: Fraction(1), 2: Fraction(-1)})
    assert e.contains({0: Fraction(2), 1: Fraction(2), 2: Fraction(0)})
    assert not e.contains({2: Fraction(1)})


def test_filtered_subspace_leading_degrees():
    V = FilteredSubspace(CTX)
    x1 = NCSeries.gen(CTX, 1)
    c12 = log_magnus(wd.comm(wd.generator(1, 2), wd.generator(2, 2)), CTX)
    assert V.add(x1 + c12)
    assert V.add(c12)
    assert V.leading_degrees() == [1, 2]
    lead2 = V.leading_space(2)
    assert len(lead2) == 1
    assert lead2[0][(1, 2)] == 1


def test_leading_space_rejects_bad_degree():
    V = FilteredSubspace(CTX)
    with pytest.raises(SeriesError):
        V.leading_space(0)
    with pytest.raises(SeriesError):
        V.leading_space(4)


def test_constant_term_rejected():
    V = FilteredSubspace(CTX)
    with pytest.raises(SeriesError):
        V.add(NCSeries.one(CTX))


def test_span_add_functional():
    V = FilteredSubspace(CTX)
    V.add(NCSeries.gen(CTX, 1))
    W, grew = span_add(V, NCSeries.gen(CTX, 2))
    assert grew and W.dim == 2 and V.dim == 1
    _, grew2 = span_add(W, NCSeries.gen(CTX, 1).scale(Fraction(5)))
    assert not grew2


def test_subspace_contains_homogeneous():
    a = NCSeries(CTX, {(1, 2): Fraction(1), (2, 1): Fraction(-1)})
    b = NCSeries(CTX, {(1, 2): Fraction(2), (2, 1): Fraction(-2)})
    assert subspace_contains([a], [b])
    c = NCSeries(CTX, {(1, 1): Fraction(1)})
    assert not subspace_contains([a], [c])
    with pytest.raises(SeriesError):
        subspace_contains([a], [NCSeries.gen(CTX, 1)])
