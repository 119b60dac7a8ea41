import difflib
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import short_string
from medwer._oracles import (lcs_subsequence_length, lcs_substring_length,
                             naive_match_total)
from medwer.fuzzy import (MatchBlock, longest_match, match_total,
                          matching_blocks, similarity_ratio)


def test_longest_match_prefers_earliest_on_ties():
    # "di" and "in" both have length 2; smaller a_start wins
    assert longest_match("digoxin", "dikod sin") == MatchBlock(0, 0, 2)


def test_longest_match_disjoint_alphabets():
    assert longest_match("abc", "xyz") is None


def test_longest_match_common_prefix():
    assert longest_match("quinidine", "quinidan") == MatchBlock(0, 0, 6)


def test_longest_match_respects_ranges():
    # restricted to the tail of both strings, "in" is the best block
    assert longest_match("digoxin", "dikod sin", (2, 7), (2, 9)) == MatchBlock(5, 7, 2)


def test_longest_match_rejects_bad_ranges():
    with pytest.raises(ValueError):
        longest_match("ab", "cd", (0, 3), None)
    with pytest.raises(ValueError):
        longest_match("ab", "cd", None, (2, 1))


def test_ratio_identity():
    assert similarity_ratio("abc", "abc") == 1.0


def test_ratio_quinidine_anchor():
    got = Fraction(2 * match_total("quinidine", "quinidan"), len("quinidine") + len("quinidan"))
    assert got == Fraction(14, 17)
    assert abs(similarity_ratio("quinidine", "quinidan") - 14 / 17) < 1e-15


def test_ratio_digoxin_anchor():
    assert similarity_ratio("digoxin", "dikod sin") == 0.625


def test_ratio_disjoint():
    assert similarity_ratio("abc", "xyz") == 0.0


def test_ratio_empty_conventions():
    assert similarity_ratio("", "") == 1.0
    assert similarity_ratio("", "abc") == 0.0
    assert similarity_ratio("abc", "") == 0.0


@given(short_string)
def test_ratio_self_is_one(s):
    assert similarity_ratio(s, s) == 1.0


@given(short_string, short_string)
def test_ratio_zero_iff_no_shared_character(a, b):
    ratio = similarity_ratio(a, b)
    if a and b:
        assert (ratio == 0.0) == (not set(a) & set(b))
    assert 0.0 <= ratio <= 1.0


@given(short_string, short_string)
def test_ratio_bounded_by_substring_and_subsequence(a, b):
    total = len(a) + len(b)
    if total == 0:
        return
    m = match_total(a, b)
    assert lcs_substring_length(a, b) <= m <= lcs_subsequence_length(a, b)


@given(short_string, short_string)
def test_matches_naive_oracle(a, b):
    assert match_total(a, b) == naive_match_total(a, b)


@given(short_string, short_string)
def test_matches_stdlib_matcher(a, b):
    expected = difflib.SequenceMatcher(None, a, b, autojunk=False).ratio()
    assert similarity_ratio(a, b) == expected


@given(short_string, short_string)
def test_appending_unmatched_character_lowers_ratio(a, b):
    # "z" is outside the generation alphabet, so it can never match
    before = similarity_ratio(a, b)
    after = similarity_ratio(a, b + "z")
    if before > 0:
        assert after < before
    else:
        assert after == 0.0


@given(short_string, short_string)
def test_blocks_are_real_and_ordered(a, b):
    blocks = matching_blocks(a, b)
    prev_a_end = prev_b_end = 0
    for block in blocks:
        assert block.length >= 1
        assert a[block.a_start:block.a_start + block.length] == b[block.b_start:block.b_start + block.length]
        # non-crossing: each block starts after the previous one ends on both sides
        assert block.a_start >= prev_a_end
        assert block.b_start >= prev_b_end
        prev_a_end = block.a_start + block.length
        prev_b_end = block.b_start + block.length
