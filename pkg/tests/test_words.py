from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freeharm.errors import DomainError, InvalidLetterError, ResourceCapError
from freeharm.words import (
    GroupContext,
    Word,
    conjugacy_sphere_count,
    cyclic_reduce,
    enumerate_ball,
    enumerate_sphere,
    format_word,
    invert,
    is_conjugate,
    is_cyclically_reduced,
    iter_sphere,
    multiply,
    parse_word,
    reduce,
)

from oracles import all_reduced_words, reduce_letters

D2 = GroupContext(2)


def raw_letters(d=3, max_size=14):
    letter = st.integers(1, d).flatmap(lambda i: st.sampled_from([i, -i]))
    return st.lists(letter, max_size=max_size)


def reduced_words(d=3, max_size=10):
    return raw_letters(d, max_size).map(lambda x: reduce(x, d))


# ---------------------------------------------------------------- examples


@pytest.mark.parametrize(
    "raw, expected",
    [([1, -1, 2], [2]), ([], []), ([1, 2, -2, -1, 1], [1])],
)
def test_reduce_examples(raw, expected):
    assert reduce(raw, 2) == tuple(expected)


@pytest.mark.parametrize("bad", [[0], [3], [1, -3], [1.5]])
def test_reduce_rejects_bad_letters(bad):
    with pytest.raises(InvalidLetterError):
        reduce(bad, 2)


def test_invalid_letter_reports_position():
    with pytest.raises(InvalidLetterError) as info:
        reduce([1, 2, 7], 2)
    assert info.value.position == 2


@pytest.mark.parametrize(
    "s, t, expected",
    [([1, 2], [-2, -1], []), ([1], [2], [1, 2]), ([1, 2], [-2, 1], [1, 1])],
)
def test_multiply_examples(s, t, expected):
    assert multiply(Word(s), Word(t)) == tuple(expected)
    assert Word(s) * Word(t) == tuple(expected)


@pytest.mark.parametrize("s, expected", [([1, 2], [-2, -1]), ([], []), ([1, 1], [-1, -1])])
def test_invert_examples(s, expected):
    assert invert(Word(s)) == tuple(expected)
    assert ~Word(s) == tuple(expected)


def test_word_plus_is_refused():
    with pytest.raises(TypeError):
        Word([1]) + Word([2])


@pytest.mark.parametrize("k, count", [(0, 1), (1, 4), (3, 36)])
def test_sphere_examples(k, count):
    words = enumerate_sphere(D2, k)
    assert len(words) == count == D2.sphere_size(k)
    if k == 0:
        assert words == [()]


def test_sphere_negative_index():
    with pytest.raises(DomainError):
        enumerate_sphere(D2, -1)


def test_sphere_order_is_lexicographic():
    assert enumerate_sphere(D2, 1) == [(1,), (-1,), (2,), (-2,)]
    assert enumerate_sphere(D2, 2)[:3] == [(1, 1), (1, 2), (1, -2)]


def test_enumeration_cap():
    ctx = GroupContext(2, max_length=5)
    with pytest.raises(ResourceCapError):
        enumerate_sphere(ctx, 6)


def test_rank_cap():
    with pytest.raises(DomainError):
        GroupContext(17)
    with pytest.raises(DomainError):
        GroupContext(1)


def test_ball_sizes():
    assert [len(enumerate_ball(D2, r)) for r in range(4)] == [1, 5, 17, 53]


@pytest.mark.parametrize(
    "w, expected", [([-1, 2, 1], [2]), ([1, 2], [1, 2]), ([-2, 1, 1, 2], [1, 1])]
)
def test_cyclic_reduce_examples(w, expected):
    assert cyclic_reduce(Word(w)) == tuple(expected)


@pytest.mark.parametrize(
    "w, n, count", [([1], 0, 1), ([1], 1, 2), ([1], 2, 6)]
)
def test_conjugacy_count_examples(w, n, count):
    assert conjugacy_sphere_count(D2, w, n) == count


def test_conjugacy_count_hand_list():
    # b a B and B a b are the two conjugates of a on W_3
    hits = [s for s in enumerate_sphere(D2, 3) if is_conjugate(s, (1,))]
    assert sorted(map(format_word, hits)) == ["Bab", "baB"]


def test_conjugacy_count_errors():
    with pytest.raises(DomainError):
        conjugacy_sphere_count(D2, [], 1)
    with pytest.raises(DomainError):
        conjugacy_sphere_count(D2, [1, 2, -1], 1)


def test_text_form():
    assert format_word(Word([1, 2, -1])) == "abA"
    assert parse_word("abA", 2) == (1, 2, -1)
    assert format_word(Word()) == "e"
    assert parse_word("e") == ()
    with pytest.raises(InvalidLetterError):
        parse_word("a1", 2)
    with pytest.raises(InvalidLetterError):
        parse_word("c", 2)


# ---------------------------------------------------------------- oracles


@pytest.mark.parametrize("d, k", [(2, 1), (2, 4), (3, 3)])
def test_sphere_matches_filter_oracle(d, k):
    ctx = GroupContext(d)
    assert set(enumerate_sphere(ctx, k)) == set(all_reduced_words(d, k))


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("k", range(1, 9))
def test_sphere_counts(d, k):
    ctx = GroupContext(d)
    assert sum(1 for _ in iter_sphere(ctx, k)) == 2 * d * (2 * d - 1) ** (k - 1)


def test_conjugacy_bound_exhaustive():
    # every cyclically reduced w with |w| <= 2, n <= 3
    for w in enumerate_ball(D2, 2):
        if not w or not is_cyclically_reduced(w):
            continue
        for n in range(1, 4):
            assert conjugacy_sphere_count(D2, w, n) >= 3 ** (n - 1)


# ---------------------------------------------------------------- properties


@given(raw_letters())
def test_reduce_agrees_with_scan_oracle(x):
    assert reduce(x) == reduce_letters(x)


@given(raw_letters())
def test_reduce_idempotent(x):
    r = reduce(x)
    assert reduce(r) == r
    assert all(r[i] != -r[i + 1] for i in range(len(r) - 1))


@given(reduced_words(), reduced_words(), reduced_words())
def test_associativity(s, t, u):
    assert multiply(multiply(s, t), u) == multiply(s, multiply(t, u))


@given(reduced_words(), reduced_words())
def test_length_parity_and_range(s, t):
    m = len(multiply(s, t))
    assert abs(len(s) - len(t)) <= m <= len(s) + len(t)
    assert (len(s) + len(t) - m) % 2 == 0


@given(reduced_words())
def test_inverse_is_two_sided(s):
    assert multiply(s, invert(s)) == () == multiply(invert(s), s)
    assert invert(invert(s)) == s


@given(reduced_words(), reduced_words())
def test_conjugates_are_detected(s, g):
    c = multiply(multiply(g, s), invert(g))
    assert is_conjugate(s, c)
    assert is_cyclically_reduced(cyclic_reduce(c))
    assert len(cyclic_reduce(c)) == len(cyclic_reduce(s))


@given(reduced_words())
def test_text_round_trip(s):
    assert parse_word(format_word(s), 3) == s


@settings(max_examples=30)
@given(st.integers(2, 4), st.integers(0, 3))
def test_ball_is_union_of_spheres(d, r):
    ctx = GroupContext(d)
    ball = enumerate_ball(ctx, r)
    assert len(ball) == len(set(ball)) == ctx.ball_size(r)
