from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import orbitdepth.words as wd
from orbitdepth.series import (
    NCSeries,
    TruncationContext,
    SeriesError,
    bracket,
    exp,
    log,
    magnus,
    log_magnus,
    bch,
    shuffle,
)

CTX3 = TruncationContext(2, 3)
CTX4 = TruncationContext(2, 4)


def lie_series(ctx, seed):
    """Small deterministic Lie element: combination of generators."""
    a = NCSeries.gen(ctx, 1).scale(Fraction(seed % 5 - 2))
    b = NCSeries.gen(ctx, 2).scale(Fraction((seed // 5) % 5 - 2))
    return a + b


def test_context_word_count():
    # 1 + 2 + 4 + 8 words of length <= 3 over two letters
    assert len(CTX3.words()) == 15


def test_truncation_drops_long_words():
    s = NCSeries(CTX3, {(1, 2, 1, 2): Fraction(1), (1,): Fraction(2)})
    assert s.coeffs == {(1,): Fraction(2)}


def test_multiplication_truncates():
    x = NCSeries.gen(CTX3, 1)
    p = x * x * x * x
    assert p.is_zero()


@given(st.integers(0, 24), st.integers(0, 24))
def test_exp_log_roundtrip(i, j):
    x = lie_series(CTX4, i) + bracket(NCSeries.gen(CTX4, 1), NCSeries.gen(CTX4, 2)).scale(
        Fraction(j % 5 - 2)
    )
    assert log(exp(x)) == x
    assert exp(log(NCSeries.one(CTX4) + x)) == NCSeries.one(CTX4) + x


def test_exp_rejects_constant_term():
    with pytest.raises(SeriesError):
        exp(NCSeries.one(CTX3))
    with pytest.raises(SeriesError):
        log(NCSeries.zero(CTX3))


def test_magnus_is_multiplicative():
    u = wd.reduce([1, 2, -1], 2)
    v = wd.reduce([2, 2, 1], 2)
    assert magnus(wd.mul(u, v), CTX4) == magnus(u, CTX4) * magnus(v, CTX4)


def test_magnus_inverse():
    w = wd.reduce([1, 2, -1, -2], 2)
    assert magnus(w, CTX4) * magnus(wd.inv(w), CTX4) == NCSeries.one(CTX4)


def test_log_magnus_frozen_commutator():
    # log magnus([x1,x2]) = [X1,X2] + higher order
    w = wd.comm(wd.generator(1, 2), wd.generator(2, 2))
    x = log_magnus(w, CTX3)
    assert x[(1, 2)] == 1
    assert x[(2, 1)] == -1
    assert x[(1,)] == 0 and x[(2,)] == 0


def test_bch_closed_form_grade3():
    a = NCSeries.gen(CTX3, 1)
    b = NCSeries.gen(CTX3, 2)
    expected = (
        a
        + b
        + bracket(a, b).scale(Fraction(1, 2))
        + (bracket(a, bracket(a, b)) + bracket(b, bracket(b, a))).scale(Fraction(1, 12))
    )
    assert bch(a, b) == expected


def test_shuffle_counts():
    s = shuffle((1,), (2,))
    assert s == {(1, 2): 1, (2, 1): 1}
    s = shuffle((1, 1), (1,))
    assert s == {(1, 1, 1): 3}


@settings(max_examples=60)
@given(st.lists(st.sampled_from([1, 2, -1, -2]), max_size=6))
def test_magnus_satisfies_shuffle_identity(raw):
    # group-like: coeff(u)*coeff(v) = sum over shuffles of coeff
    w = wd.reduce(raw, 2)
    s = magnus(w, CTX4)
    for u, v in [((1,), (2,)), ((1,), (1, 2)), ((2, 1), (1,)), ((1, 2), (2,))]:
        if len(u) + len(v) > CTX4.degree:
            continue
        total = sum(mult * s[t] for t, mult in shuffle(u, v).items())
        assert s[u] * s[v] == total


def test_json_roundtrip():
    w = wd.reduce([1, 2, -1], 2)
    s = magnus(w, CTX3)
    assert NCSeries.from_json(s.to_json()) == s


def test_items_order_is_deterministic():
    s = NCSeries(CTX3, {(2, 1): Fraction(1), (1,): Fraction(1), (1, 1, 2): Fraction(1)})
    assert [w for w, _ in s.items()] == [(1,), (2, 1), (1, 1, 2)]
