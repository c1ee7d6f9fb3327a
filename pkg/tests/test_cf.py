import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cflevels.cf import (
    Word, continuants, convergent, convergents, cylinder, cylinder_length, digit_stats, expand,
    gauss_step, iter_words,
)

words = st.lists(st.integers(1, 50), min_size=1, max_size=12).map(Word)


def evaluate(digits):
    """Independent evaluation by folding from the tail."""
    x = Fraction(0)
    for a in reversed(digits):
        x = 1 / (a + x)
    return x


@pytest.mark.parametrize("x, expected", [
    (Fraction(7, 10), (1, 2, 3)),
    (Fraction(2, 3), (1, 2)),
    (Fraction(1, 2), (2,)),
])
def test_expand_examples(x, expected):
    assert expand(x, 10) == expected


def test_expand_truncates_and_rejects():
    assert expand(Fraction(7, 10), 2) == (1, 2)
    for bad in (Fraction(0), Fraction(1), Fraction(3, 2), Fraction(-1, 3)):
        with pytest.raises(ValueError):
            expand(bad, 5)


def test_word_validation():
    assert Word(()) == ()
    with pytest.raises(ValueError):
        Word((1, 0))
    with pytest.raises((ValueError, TypeError)):
        Word((1.5,))


@pytest.mark.parametrize("w, ps, qs", [
    ((1, 2, 3), (1, 2, 7), (1, 3, 10)),
    ((1, 1, 1, 1), None, (1, 2, 3, 5)),
    ((2, 1), None, (2, 3)),
])
def test_convergent_examples(w, ps, qs):
    pairs = convergents(Word(w))
    assert tuple(p.q for p in pairs) == qs
    if ps:
        assert tuple(p.p for p in pairs) == ps


@pytest.mark.parametrize("w, left, right, length", [
    ((1,), Fraction(1, 2), Fraction(1), Fraction(1, 2)),
    ((1, 2), Fraction(2, 3), Fraction(3, 4), Fraction(1, 12)),
    ((2, 2), None, None, Fraction(1, 35)),
])
def test_cylinder_examples(w, left, right, length):
    c = cylinder(Word(w))
    assert c.length == length == cylinder_length(Word(w))
    if left is not None:
        assert (c.left, c.right) == (left, right)


@pytest.mark.parametrize("x, y", [
    (Fraction(7, 10), Fraction(3, 7)),
    (Fraction(1, 2), Fraction(0)),
    (Fraction(2, 3), Fraction(1, 2)),
])
def test_gauss_step_examples(x, y):
    assert gauss_step(x) == y


def test_gauss_step_rejects_zero():
    with pytest.raises(ValueError):
        gauss_step(Fraction(0))


@pytest.mark.parametrize("w, s, t", [
    ((1, 2, 3), (1, 3, 6), (1, 2, 3)),
    ((5, 1, 1), (5, 6, 7), (5, 5, 5)),
    ((), (), ()),
])
def test_digit_stats_examples(w, s, t):
    d = digit_stats(Word(w))
    assert tuple(d.s) == s and tuple(d.t_max) == t


def test_empty_word_convergent():
    assert tuple(convergent(Word(()))) == (0, 1)


@given(words)
def test_convergent_invariants(w):
    pairs = convergents(w)
    assert Fraction(pairs[-1].p, pairs[-1].q) == evaluate(w)
    prev = (0, 1)
    for k, (p, q) in enumerate(pairs, 1):
        assert math.gcd(p, q) == 1
        assert p * prev[1] - prev[0] * q in (1, -1)
        assert q * q >= 2 ** (k - 1)
        prev = (p, q)


@given(words)
def test_cylinder_invariants(w):
    c = cylinder(w)
    q_prev, q = continuants(w)
    assert c.left < c.right
    assert c.right - c.left == c.length == Fraction(1, q * (q + q_prev))
    assert {c.left, c.right} == {evaluate(w), evaluate(w[:-1] + (w[-1] + 1,))}
    assert Fraction(1, 2 * q * q) <= c.length < Fraction(1, q * q)
    if len(w) >= 2:
        assert Fraction(1, 2 * q * q) < c.length


@given(words, st.integers(1, 30))
def test_nesting(w, a):
    parent, child = cylinder(w), cylinder(w + (a,))
    assert parent.left <= child.left < child.right <= parent.right


@given(st.lists(st.integers(1, 9), max_size=6).map(Word), st.integers(1, 60))
def test_children_exhaust_parent(w, A):
    parent = cylinder_length(w) if w else Fraction(1)
    partial = Fraction(0)
    for a in range(1, A + 1):
        nxt = partial + cylinder_length(w + (a,))
        assert nxt > partial
        partial = nxt
    assert partial <= parent
    assert (parent - partial) / parent <= Fraction(3, A)


@settings(max_examples=300)
@given(st.integers(2, 500).flatmap(lambda q: st.tuples(st.integers(1, q - 1), st.just(q))))
def test_round_trip(pq):
    x = Fraction(*pq)
    w = expand(x, 10_000)
    assert evaluate(w) == x
    c = convergent(w)
    assert Fraction(c.p, c.q) == x and c.q == x.denominator


def test_round_trip_exhaustive_small():
    for q in range(2, 120):
        for p in range(1, q):
            if math.gcd(p, q) == 1:
                assert convergent(expand(Fraction(p, q), 1000)) == (p, q)


def test_greedy_last_digit_not_one():
    for q in range(3, 60):
        for p in range(1, q):
            assert expand(Fraction(p, q), 100)[-1] >= 2


@given(st.lists(st.integers(1, 9), min_size=2, max_size=8).map(Word))
def test_gauss_drops_first_digit(w):
    x = evaluate(w)
    if w[-1] >= 2:
        assert expand(gauss_step(x), 100) == w[1:]


def test_iter_words_counts():
    assert sum(1 for _ in iter_words(3, 4)) == 64
    assert list(iter_words(1, 2)) == [(1,), (2,)]


def test_big_digits_exact():
    w = Word((10**40, 3, 10**30))
    c = cylinder(w)
    q_prev, q = continuants(w)
    assert c.length == Fraction(1, q * (q + q_prev))
