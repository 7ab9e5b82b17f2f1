from math import comb

import pytest
from hypothesis import given, strategies as st

from mouldkit.alphabet import (
    EMPTY,
    TruncationContext,
    check_letter,
    enumerate_words,
    format_word,
    is_resonant,
    letter_closure,
    parse_word,
    partitions,
    word_concat,
    word_key,
    word_norm,
    word_weight,
)
from mouldkit.scalars import Scalar

letters2 = st.tuples(st.integers(-1, 3), st.integers(-1, 3)).filter(lambda n: sum(n) >= 1)
words2 = st.lists(letters2, max_size=4).map(tuple)


def test_concat():
    a, b, c = ((1,),), ((2,),), ((3,),)
    assert word_concat(EMPTY, a) == a
    assert word_concat(a, b + c) == ((1,), (2,), (3,))


def test_norm_examples():
    assert word_norm(EMPTY, 2) == (0, 0)
    assert word_norm(((1, 2),)) == (1, 2)
    assert word_norm(((1, 0), (0, 2), (-1, 1))) == (0, 3)


@given(words2, words2)
def test_norm_is_additive(a, b):
    total = word_norm(word_concat(a, b), 2)
    assert total == tuple(x + y for x, y in zip(word_norm(a, 2), word_norm(b, 2)))


def test_resonance():
    assert not is_resonant(TruncationContext(1, (2,), 3), (1,))
    ctx = TruncationContext(2, (Scalar(2), Scalar(1, 0) / 2), 3)
    assert is_resonant(ctx, (1, 1))
    assert not is_resonant(ctx, (2, 1))


def test_letter_validity():
    assert check_letter((2, -1), 2) == (2, -1)
    with pytest.raises(ValueError):
        check_letter((0, 0), 2)
    with pytest.raises(ValueError):
        check_letter((-1, -1, 3), 3)
    with pytest.raises(ValueError):
        check_letter((-2, 4), 2)
    # substitution operators may shift by several negative components
    assert check_letter((-2, 4), 2, derivation=False) == (-2, 4)


def test_enumerate_examples():
    ctx = TruncationContext(1, (2,), 3)
    assert list(enumerate_words(ctx, [], 3)) == [EMPTY]
    words = list(enumerate_words(ctx, [(1,)], 2))
    assert words == [EMPTY, ((1,),), ((1,), (1,))]
    ctx2 = TruncationContext(2, (2, 3), 3)
    assert len(list(enumerate_words(ctx2, [(1, 0), (0, 1)], 3))) == 15


def _naive(letters, W):
    out = [EMPTY]
    for n in letters:
        if sum(n) <= W:
            out += [(n,) + rest for rest in _naive(letters, W - sum(n))]
    return out


@pytest.mark.parametrize("W", [0, 1, 2, 3, 4])
def test_enumerate_matches_naive(W):
    letters = [(1, 0), (0, 1), (2, -1), (1, 1)]
    ctx = TruncationContext(2, (2, 3), W)
    got = list(enumerate_words(ctx, letters, W))
    assert len(got) == len(set(got))
    assert set(got) == set(_naive(letters, W))
    assert got == sorted(got, key=word_key)


def test_partitions():
    a, b, c = (1,), (2,), (3,)
    assert list(partitions((a, b, c), 2)) == [((a,), (b, c)), ((a, b), (c,))]
    assert list(partitions((a, b, c), 3)) == [((a,), (b,), (c,))]
    assert list(partitions((a, b, c), 1)) == [((a, b, c),)]
    assert list(partitions((a, b), 0)) == []
    assert list(partitions((a, b), 3)) == []


@given(st.lists(letters2, min_size=1, max_size=6).map(tuple), st.integers(1, 6))
def test_partition_count(w, k):
    assert len(list(partitions(w, k))) == (comb(len(w) - 1, k - 1) if k <= len(w) else 0)


def test_closure():
    assert letter_closure([(1,)], 3) == ((1,), (2,), (3,))
    assert letter_closure([(2, -1), (0, 1)], 2) == ((0, 1), (0, 2), (2, -1), (2, 0), (4, -2))


@given(words2)
def test_word_text_roundtrip(w):
    assert parse_word(format_word(w)) == w


def test_word_text_format():
    assert format_word(((1, 0), (-1, 2))) == "(1,0).(-1,2)"
    assert format_word(EMPTY) == "()"
    assert parse_word("(1,0).(−1,2)") == ((1, 0), (-1, 2))
    assert word_weight(((1, 0), (-1, 2))) == 2


def test_context_rejects_zero_multiplier():
    with pytest.raises(ValueError):
        TruncationContext(1, (0,), 3)
