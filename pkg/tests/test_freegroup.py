import random

import pytest
from hypothesis import given, strategies as st

from tanglefree.carrier import subgroup_rank
from tanglefree.freegroup import (
    Letter,
    ParseError,
    RankMismatch,
    Word,
    concat,
    distinct_powers_check,
    format_word,
    invert,
    parse_word,
    power,
    random_word,
    reduce,
    word_length,
)

raw_letters = st.lists(st.tuples(st.integers(1, 3), st.sampled_from([1, -1])), max_size=30)
words = raw_letters.map(lambda ls: reduce(ls, 3))


def test_parse_letter_style():
    w = parse_word("a B a b", 2)
    assert w.letters == ((1, 1), (2, -1), (1, 1), (2, 1))


def test_parse_cancels():
    assert parse_word("a A", 1) == Word(1)


def test_parse_example_word():
    w1 = parse_word("A B a b", 3)
    assert w1.letters == ((1, -1), (2, -1), (1, 1), (2, 1))
    assert word_length(w1) == 4
    assert word_length(parse_word("A C a B c", 3)) == 5


def test_parse_indexed_style():
    assert parse_word("g1 G2 g30", 30).letters == ((1, 1), (2, -1), (30, 1))
    assert parse_word("aB", 2) == parse_word("a B", 2)


@pytest.mark.parametrize("text, pos", [("a 3", 2), ("a g1", 2), ("ab c!", 4), ("g1x", 2)])
def test_parse_errors_report_position(text, pos):
    with pytest.raises(ParseError) as info:
        parse_word(text, 30)
    assert info.value.position == pos


def test_parse_rank_exceeded():
    with pytest.raises(ParseError, match="exceeds rank"):
        parse_word("a c", 2)
    with pytest.raises(ParseError):
        parse_word("g5", 4)


def test_printer_styles():
    assert format_word(parse_word("a B", 2)) == "a B"
    w = Word(27, ((27, 1), (1, -1)))
    assert format_word(w) == "g27 G1"


@given(words)
def test_print_parse_roundtrip(w):
    assert parse_word(format_word(w), 3) == w
    wide = Word(40, w.letters)
    assert parse_word(format_word(wide), 40) == wide


def test_reduce_examples():
    assert reduce([(1, 1), (1, -1)]) == Word(1)
    assert reduce([(1, 1), (2, 1), (2, -1), (1, 1)]).letters == ((1, 1), (1, 1))
    w = parse_word("a b A", 2)
    assert reduce(w.letters, 2) == w


def _reduce_random_order(letters, rng):
    letters = list(letters)
    while True:
        spots = [i for i in range(len(letters) - 1)
                 if letters[i][0] == letters[i + 1][0] and letters[i][1] == -letters[i + 1][1]]
        if not spots:
            return tuple(letters)
        i = rng.choice(spots)
        del letters[i:i + 2]


@given(raw_letters, st.integers(0, 2**32))
def test_reduction_confluent(raw, seed):
    expected = reduce(raw, 3).letters
    assert _reduce_random_order(raw, random.Random(seed)) == expected


@given(words)
def test_stored_form_reduced(w):
    for a, b in zip(w.letters, w.letters[1:]):
        assert not (a.generator == b.generator and a.sign == -b.sign)


def test_word_ops_examples():
    assert invert(parse_word("a b", 2)) == parse_word("B A", 2)
    assert power(parse_word("a", 1), 3) == parse_word("a a a", 1)
    assert concat(parse_word("a B", 2), parse_word("b a", 2)) == parse_word("a a", 2)
    assert power(parse_word("a b", 2), 0) == Word(2)


@given(words, st.integers(0, 8))
def test_power_matches_repeated_concat(w, t):
    acc = Word(3)
    for _ in range(t):
        acc = concat(acc, w)
    assert power(w, t) == acc
    assert word_length(power(w, t)) <= t * word_length(w)


@given(words)
def test_inverse_laws(w):
    assert invert(invert(w)) == w
    assert concat(w, invert(w)) == Word(3)


def test_rank_mismatch():
    with pytest.raises(RankMismatch):
        concat(Word(1), Word(2))
    with pytest.raises(RankMismatch):
        distinct_powers_check(Word(1, ((1, 1),)), Word(2, ((1, 1),)))


def test_distinct_powers_examples(example_words):
    assert distinct_powers_check(parse_word("a", 2), parse_word("b", 2))
    assert not distinct_powers_check(parse_word("a b", 2), parse_word("a b a b", 2))
    w1, w2 = example_words
    assert subgroup_rank([w1, w2]) == 2
    assert distinct_powers_check(w1, w2)


@given(words)
def test_distinct_powers_self(w):
    assert not distinct_powers_check(w, w)


def test_trivial_word_has_no_distinct_powers():
    assert not distinct_powers_check(Word(2), parse_word("a", 2))


def test_random_word_is_reduced_with_length_bounds():
    rng = random.Random(5)
    for _ in range(200):
        w = random_word(rng, 3, 6)
        assert 1 <= len(w) <= 6


def test_letter_inverse():
    assert Letter(2, 1).inverse() == Letter(2, -1)
