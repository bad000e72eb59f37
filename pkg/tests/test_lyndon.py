from fractions import Fraction

import pytest

import orbitdepth.words as wd
from orbitdepth.series import NCSeries, TruncationContext, SeriesError, bracket, log_magnus
from orbitdepth.lyndon import (
    lyndon_words,
    is_lyndon,
    standard_factorization,
    lyndon_bracketing,
    lie_coords,
    lie_coords_graded,
    from_lie_coords,
    dynkin_map,
    is_primitive,
    LieElement,
    lyndon_index,
)

CTX = TruncationContext(2, 4)


def test_lyndon_counts_rank2():
    # necklace counts: 2, 1, 2, 3, 6, 9
    assert [len(lyndon_words(2, d)) for d in range(1, 7)] == [2, 1, 2, 3, 6, 9]


def test_lyndon_counts_rank3():
    assert [len(lyndon_words(3, d)) for d in range(1, 5)] == [3, 3, 8, 18]


def test_is_lyndon_frozen():
    assert is_lyndon((1, 2))
    assert is_lyndon((1, 1, 2))
    assert not is_lyndon((2, 1))
    assert not is_lyndon((1, 2, 1, 2))
    assert not is_lyndon(())


def test_standard_factorization():
    assert standard_factorization((1, 2)) == ((1,), (2,))
    assert standard_factorization((1, 1, 2)) == ((1,), (1, 2))
    assert standard_factorization((1, 1, 2, 2)) == ((1,), (1, 2, 2))
    with pytest.raises(ValueError):
        standard_factorization((2, 1))


def test_bracketing_leading_term():
    # triangularity: bracketing of w = w + lexicographically larger words
    for w in lyndon_words(2, 3) + lyndon_words(2, 4):
        b = lyndon_bracketing(w, CTX)
        assert b[w] == 1
        for word in b.coeffs:
            assert word >= w


def test_lie_coords_roundtrip():
    coords = {2: {(1, 2): Fraction(3)}, 3: {(1, 1, 2): Fraction(-1), (1, 2, 2): Fraction(5, 2)}}
    x = from_lie_coords(coords, CTX)
    assert lie_coords_graded(x) == coords


def test_lie_coords_rejects_non_lie():
    # a single word (2,1) is not a Lie element in degree 2
    with pytest.raises(SeriesError):
        lie_coords(NCSeries(CTX, {(2, 1): Fraction(1)}), 2)
    with pytest.raises(SeriesError):
        lie_coords(NCSeries(CTX, {(1,): Fraction(1), (1, 2): Fraction(1)}), 2)


def test_dynkin_primitivity_on_brackets():
    a = bracket(NCSeries.gen(CTX, 1), NCSeries.gen(CTX, 2))
    assert dynkin_map(a) == a.scale(Fraction(2))
    assert is_primitive(a)
    b = bracket(a, NCSeries.gen(CTX, 1))
    assert dynkin_map(b) == b.scale(Fraction(3))


def test_log_magnus_is_primitive():
    w = wd.reduce([1, 2, 2, -1, 2], 2)
    assert is_primitive(log_magnus(w, CTX))


def test_magnus_itself_not_primitive():
    from orbitdepth.series import magnus

    w = wd.reduce([1, 2], 2)
    assert not is_primitive(magnus(w, CTX))


def test_lie_element_wrapper():
    x = log_magnus(wd.reduce([1, 2], 2), CTX)
    el = LieElement(x)
    assert el.coords[1] == {(1,): Fraction(1), (2,): Fraction(1)}
    with pytest.raises(SeriesError):
        LieElement(NCSeries(CTX, {(2, 1): Fraction(1)}))


def test_lyndon_index_layout():
    idx = lyndon_index(2, 4)
    assert len(idx) == 2 + 1 + 2 + 3
    assert idx.words[:3] == [(1,), (2,), (1, 2)]
    assert list(idx.degree_slice(3)) == [3, 4]
    assert idx.dim(4) == 3


def test_lyndon_index_vector_roundtrip():
    idx = lyndon_index(2, 4)
    x = log_magnus(wd.reduce([1, 2, -1, -2, 1], 2), TruncationContext(2, 4))
    v = idx.vector(x)
    assert idx.series(v) == x
