"""Exact continued-fraction algebra.

Everything here works on Python integers and :class:`fractions.Fraction`;
no floating point is involved, so results can be compared bit for bit.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple


class Word(tuple):
    """A finite word of partial quotients ``(a_1, ..., a_n)``, each ``>= 1``.

    The empty word stands for the whole unit interval.
    """

    __slots__ = ()

    def __new__(cls, digits: Iterable[int] = ()):
        digits = tuple(digits)
        for i, a in enumerate(digits, 1):
            if isinstance(a, bool) or not isinstance(a, int):
                raise TypeError(f"digit a_{i}={a!r} is not an integer")
            if a < 1:
                raise ValueError(f"digit a_{i}={a} must be >= 1")
        return super().__new__(cls, digits)

    def __repr__(self):
        return f"Word({tuple(self)!r})"

    def __add__(self, other):
        return Word(tuple(self) + tuple(other))

    def evaluate(self) -> Fraction:
        """Value of the finite continued fraction ``[a_1, ..., a_n]``."""
        if not self:
            raise ValueError("the empty word has no value")
        p, q = convergent(self)
        return Fraction(p, q)


def as_word(w) -> Word:
    return w if isinstance(w, Word) else Word(w)


class ConvergentPair(NamedTuple):
    p: int
    q: int


@dataclass(frozen=True)
class Cylinder:
    """Rank-n basic interval: reals in (0,1) whose expansion starts with ``word``."""

    word: Word
    left: Fraction
    right: Fraction
    length: Fraction


@dataclass(frozen=True)
class DigitStats:
    s: list
    t_max: list


def _check_unit(x) -> Fraction:
    x = Fraction(x)
    if not 0 < x < 1:
        raise ValueError(f"x={x} must lie in the open interval (0, 1)")
    return x


def expand(x, max_len: int) -> Word:
    """Greedy expansion of a rational ``x`` in (0, 1), at most ``max_len`` digits.

    Rationals have two expansions, ``[..., a]`` and ``[..., a - 1, 1]``; this
    returns the one produced by iterating the Gauss map, whose last digit is
    always >= 2. No normalisation is applied.
    """
    x = _check_unit(x)
    if max_len < 0:
        raise ValueError("max_len must be >= 0")
    p, q = x.numerator, x.denominator
    digits = []
    while p and len(digits) < max_len:
        a, r = divmod(q, p)
        digits.append(a)
        p, q = r, p
    return Word(digits)


def convergents(w) -> list[ConvergentPair]:
    """All convergents ``(p_k, q_k)``, k = 1..n, of a non-empty word."""
    w = as_word(w)
    if not w:
        raise ValueError("convergents need a non-empty word")
    p_prev, p = 1, 0
    q_prev, q = 0, 1
    out = []
    for a in w:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        out.append(ConvergentPair(p, q))
    return out


def convergent(w) -> ConvergentPair:
    """Last convergent ``(p_n, q_n)``; the empty word gives ``(0, 1)``."""
    p_prev, p = 1, 0
    q_prev, q = 0, 1
    for a in w:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
    return ConvergentPair(p, q)


def continuants(w) -> tuple[int, int]:
    """``(q_{n-1}, q_n)`` for the word, with ``q_{-1} = 0, q_0 = 1``."""
    q_prev, q = 0, 1
    for a in w:
        q_prev, q = q, a * q + q_prev
    return q_prev, q


def cylinder_length(w) -> Fraction:
    """Exact ``|I_n(w)| = 1 / (q_n (q_n + q_{n-1}))``."""
    q_prev, q = continuants(w)
    return Fraction(1, q * (q + q_prev))


def cylinder(w) -> Cylinder:
    w = as_word(w)
    if not w:
        raise ValueError("cylinder needs a non-empty word")
    p_prev, p = 1, 0
    q_prev, q = 0, 1
    for a in w:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
    # the two endpoints are [a_1..a_n] and [a_1..a_{n-1}, a_n + 1]
    e1 = Fraction(p, q)
    e2 = Fraction(p + p_prev, q + q_prev)
    left, right = (e1, e2) if e1 < e2 else (e2, e1)
    return Cylinder(w, left, right, right - left)


def gauss_step(x) -> Fraction:
    """The Gauss map ``{1/x}`` on a rational in (0, 1)."""
    x = _check_unit(x)
    inv = 1 / x
    return inv - (inv.numerator // inv.denominator)


def digit_stats(w) -> DigitStats:
    w = as_word(w)
    return DigitStats(list(itertools.accumulate(w)), list(itertools.accumulate(w, max)))


def iter_words(length: int, max_digit: int) -> Iterator[Word]:
    """All words of the given length over ``{1, ..., max_digit}`` in lexicographic order."""
    for digits in itertools.product(range(1, max_digit + 1), repeat=length):
        yield Word(digits)
