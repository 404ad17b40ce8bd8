import itertools

import pytest
from hypothesis import given, strategies as st

from dyckshift.dyck import (
    UNIT,
    ZERO,
    ReducedForm,
    Symbol,
    format_word,
    height_profile,
    parse_word,
    reduce_word,
    reduced_concat,
    word_alphabet,
)

M = 2
letters = st.sampled_from(word_alphabet(3))
words = st.lists(letters, max_size=14).map(tuple)


def pair(closes, opens):
    return ReducedForm(False, tuple(closes), tuple(opens))


@pytest.mark.parametrize(
    "text, expected",
    [
        ("a1 b1", UNIT),
        ("a1 b2", ZERO),
        ("b2 a1", pair([2], [1])),
        ("a1 a2 b2", pair([], [1])),
        ("", UNIT),
    ],
)
def test_reduce_examples(text, expected):
    assert reduce_word(parse_word(text)) == expected


def test_reduced_concat_examples():
    assert reduced_concat(pair([], [1]), pair([1], [])) == UNIT
    assert reduced_concat(ZERO, pair([1], [2])) is ZERO
    assert reduced_concat(pair([2], [1]), ZERO) is ZERO
    # open 1 meets close 2: the concatenated word b2 a1 b2 a3 reduces to zero
    oracle = reduce_word(parse_word("b2 a1 b2 a3"))
    assert oracle is ZERO
    assert reduced_concat(pair([2], [1]), pair([2], [3])) == oracle


@pytest.mark.parametrize(
    "text, expected",
    [("a1 a2", [0, 1, 2]), ("a1 b1", [0, 1, 0]), ("b1 a1 a2 b2", [0, -1, 0, 1, 0])],
)
def test_height_profile_examples(text, expected):
    assert height_profile(parse_word(text)) == expected


def test_printing():
    assert str(ZERO) == "0"
    assert str(UNIT) == "1"
    assert str(pair([2], [1])) == "b2 a1"
    assert format_word(parse_word("a10 b3")) == "a10 b3"
    assert str(Symbol.from_code(-4)) == "b4"
    assert Symbol("Open", 3).code == 3


@pytest.mark.parametrize("text", ["c1", "a0", "a", "a1b1", "b-1"])
def test_parse_rejects_unknown_tokens(text):
    with pytest.raises(ValueError):
        parse_word(text)


def test_parse_rejects_index_above_M():
    with pytest.raises(ValueError, match="outside"):
        parse_word("a1 b3", M=2)


def test_homomorphism_exhaustive_short_words():
    short = [w for L in range(6) for w in itertools.product(word_alphabet(M), repeat=L)]
    red = {w: reduce_word(w) for w in short}
    for u in short:
        ru = red[u]
        for v in short:
            assert reduce_word(u + v) == reduced_concat(ru, red[v])


@given(words, words)
def test_homomorphism_random(u, v):
    assert reduce_word(u + v) == reduced_concat(reduce_word(u), reduce_word(v))


@given(words, words, st.integers(1, 3))
def test_insertion_invariance(u, v, k):
    assert reduce_word(u + (k, -k) + v) == reduce_word(u + v)


@given(words)
def test_height_matches_reduced_pair(w):
    r = reduce_word(w)
    prof = height_profile(w)
    assert prof[0] == 0 and len(prof) == len(w) + 1
    assert all(b - a == (1 if c > 0 else -1) for a, b, c in zip(prof, prof[1:], w))
    if r is not ZERO:
        assert prof[-1] == len(r.opens) - len(r.closes)


@given(words)
def test_subwords_of_nonzero_word_are_nonzero(w):
    if reduce_word(w) is ZERO:
        return
    for i in range(len(w)):
        for j in range(i + 1, len(w) + 1):
            assert reduce_word(w[i:j]) is not ZERO


@given(words)
def test_reduced_form_is_canonical(w):
    r = reduce_word(w)
    if r is not ZERO:
        assert reduce_word(r.word()) == r
